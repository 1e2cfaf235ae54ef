//! Eigenvalue spectra: validated nonincreasing vectors, generators and the
//! head/tail decomposition.
//!
//! A [`Spectrum`] is stored finitely but behaves as if padded with zeros:
//! indices past `len()` read as `0.0`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Nonincreasing, nonnegative eigenvalues `λ_1 ≥ λ_2 ≥ … ≥ λ_n ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Validates and sorts `values` into nonincreasing order.
    ///
    /// Rejects empty input, negative entries and non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        Self::from_unsorted(values)
    }

    /// The zero-length spectrum; the identity for [`concat`].
    pub fn empty() -> Self {
        Spectrum { values: Vec::new() }
    }

    fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        // -0.0 sorts below 0.0; normalise so equality tests behave
        for v in &mut values {
            if *v == 0.0 {
                *v = 0.0;
            }
        }
        Ok(Spectrum { values })
    }

    /// Wraps values already known to be valid and nonincreasing.
    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| *v >= 0.0 && v.is_finite()));
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        Spectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `λ_i` for 1-based `i`, zero past the stored length.
    pub fn lambda(&self, i: usize) -> f64 {
        assert!(i >= 1, "eigenvalues are 1-indexed");
        self.values.get(i - 1).copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue, or zero for the empty spectrum.
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Number of strictly positive entries.
    pub fn rank(&self) -> usize {
        self.values.iter().take_while(|&&v| v > 0.0).count()
    }

    /// `λ_{k+1} + … + λ_n`.
    pub fn tail_sum(&self, k: usize) -> f64 {
        self.values.iter().skip(k).rev().sum()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be finite and >= 0, got {s}"
            )));
        }
        Ok(Spectrum::from_sorted_unchecked(
            self.values.iter().map(|v| v * s).collect(),
        ))
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Builds a spectrum from arbitrary nonnegative values.
pub fn make_spectrum(values: &[f64]) -> Result<Spectrum> {
    Spectrum::new(values.to_vec())
}

/// Parses one value per line or comma-separated values (or both).
///
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for field in line.split(',') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let v: f64 = field.parse().map_err(|_| {
                Error::Parse(format!(
                    "line {}: cannot parse {field:?} as a number",
                    lineno + 1
                ))
            })?;
            values.push(v);
        }
    }
    Spectrum::new(values)
}

fn check_unit_interval(name: &str, q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in (0, 1), got {q}"
        )))
    }
}

fn check_positive_len(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter(
            "spectrum length n must be positive".into(),
        ))
    } else {
        Ok(())
    }
}

/// `(1, q, q², …, q^{n−1})`.
///
/// Starts at `q⁰`; callers that want `λ_i = q^i` scale by `q`.
pub fn generate_geometric(q: f64, n: usize) -> Result<Spectrum> {
    check_unit_interval("q", q)?;
    check_positive_len(n)?;
    let values = (0..n).map(|i| q.powf(i as f64)).collect();
    Ok(Spectrum::from_sorted_unchecked(values))
}

/// `(1/1^p, 1/2^p, …, 1/n^p)`.
pub fn generate_power_law(p: f64, n: usize) -> Result<Spectrum> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "power-law exponent must be positive, got {p}"
        )));
    }
    check_positive_len(n)?;
    let values = (1..=n).map(|i| (i as f64).powf(-p)).collect();
    Ok(Spectrum::from_sorted_unchecked(values))
}

/// Piecewise-constant spectrum with value `base^l` on the index block
/// `2^l ≤ i < 2^{l+1}` (1-based), for levels `l = 0, …, lmax−1`.
///
/// With `base = 1/4` it dominates `1/i²` at every index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiecewiseDyadicSpectrum {
    lmax: u32,
    base: f64,
}

/// Largest number of levels accepted; keeps `2^lmax − 1` addressable.
pub const MAX_DYADIC_LEVELS: u32 = 48;

impl PiecewiseDyadicSpectrum {
    pub fn new(lmax: u32, base: f64) -> Result<Self> {
        if lmax == 0 || lmax > MAX_DYADIC_LEVELS {
            return Err(Error::InvalidParameter(format!(
                "lmax must lie in 1..={MAX_DYADIC_LEVELS}, got {lmax}"
            )));
        }
        check_unit_interval("base", base)?;
        Ok(PiecewiseDyadicSpectrum { lmax, base })
    }

    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// `2^lmax − 1`.
    pub fn len(&self) -> usize {
        (1usize << self.lmax) - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Value on level `l`.
    pub fn level_value(&self, l: u32) -> f64 {
        self.base.powi(l as i32)
    }

    /// Number of indices on level `l`.
    pub fn level_size(&self, l: u32) -> u64 {
        1u64 << l
    }

    /// `μ_i` for 1-based `i`; zero past the last level.
    pub fn value_at(&self, i: usize) -> f64 {
        assert!(i >= 1, "eigenvalues are 1-indexed");
        if i > self.len() {
            return 0.0;
        }
        let level = usize::BITS - 1 - i.leading_zeros();
        self.level_value(level)
    }

    /// Sum of all entries, `Σ_l 2^l base^l`.
    pub fn total(&self) -> f64 {
        (0..self.lmax)
            .map(|l| self.level_size(l) as f64 * self.level_value(l))
            .sum()
    }

    /// `μ_{k+1} + … + μ_n` without materialising `μ`.
    pub fn tail_sum(&self, k: usize) -> f64 {
        let mut sum = 0.0;
        for l in (0..self.lmax).rev() {
            let lo = 1usize << l;
            let hi = (1usize << (l + 1)) - 1;
            if hi <= k {
                break;
            }
            let count = hi - lo.max(k + 1) + 1;
            sum += count as f64 * self.level_value(l);
        }
        sum
    }

    pub fn materialize(&self) -> Spectrum {
        let mut values = Vec::with_capacity(self.len());
        for l in 0..self.lmax {
            let v = self.level_value(l);
            values.extend(std::iter::repeat_n(v, 1usize << l));
        }
        Spectrum::from_sorted_unchecked(values)
    }
}

/// Returns the dyadic descriptor and its materialised spectrum.
pub fn generate_dyadic(lmax: u32, base: f64) -> Result<(PiecewiseDyadicSpectrum, Spectrum)> {
    let spec = PiecewiseDyadicSpectrum::new(lmax, base)?;
    let mu = spec.materialize();
    Ok((spec, mu))
}

/// A spectrum split after its `k`-th entry, with the tail normalised by `λ_{k+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadTailSplit {
    pub head: Spectrum,
    pub tail: Spectrum,
    /// `λ_{k+1}`.
    pub pivot: f64,
    /// `tail / pivot`; `rho[0] == 1`.
    pub rho: Spectrum,
    pub k: usize,
}

pub fn split_head_tail(s: &Spectrum, k: usize) -> Result<HeadTailSplit> {
    if k >= s.len() {
        return Err(Error::InvalidParameter(format!(
            "split index k = {k} must be smaller than the spectrum length {}",
            s.len()
        )));
    }
    let pivot = s.values[k];
    if pivot <= 0.0 {
        return Err(Error::DegenerateTail { k });
    }
    let head = Spectrum::from_sorted_unchecked(s.values[..k].to_vec());
    let tail = Spectrum::from_sorted_unchecked(s.values[k..].to_vec());
    let mut rho: Vec<f64> = tail.values.iter().map(|v| v / pivot).collect();
    rho[0] = 1.0;
    // division can round a tied entry a hair above 1
    for r in &mut rho {
        *r = r.min(1.0);
    }
    Ok(HeadTailSplit {
        head,
        tail,
        pivot,
        rho: Spectrum::from_sorted_unchecked(rho),
        k,
    })
}

/// Multiset union of two spectra, re-sorted nonincreasing.
pub fn concat(a: &Spectrum, b: &Spectrum) -> Spectrum {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a.values[i] >= b.values[j] {
            out.push(a.values[i]);
            i += 1;
        } else {
            out.push(b.values[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a.values[i..]);
    out.extend_from_slice(&b.values[j..]);
    Spectrum::from_sorted_unchecked(out)
}

/// A spectrum given either explicitly or by a generator with known structure.
///
/// Textual generator forms: `geom:q=<f>,n=<int>`, `pow:p=<f>,n=<int>`,
/// `dyadic:lmax=<int>,base=<f>`.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumSource {
    Explicit(Spectrum),
    /// `(1, q, …, q^{n−1})`.
    Geometric {
        q: f64,
        n: usize,
    },
    PowerLaw {
        p: f64,
        n: usize,
    },
    Dyadic(PiecewiseDyadicSpectrum),
}

impl SpectrumSource {
    pub fn len(&self) -> usize {
        match self {
            SpectrumSource::Explicit(s) => s.len(),
            SpectrumSource::Geometric { n, .. } | SpectrumSource::PowerLaw { n, .. } => *n,
            SpectrumSource::Dyadic(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `λ_i` for 1-based `i`; zero past the end.
    pub fn lambda(&self, i: usize) -> f64 {
        assert!(i >= 1, "eigenvalues are 1-indexed");
        if i > self.len() {
            return 0.0;
        }
        match self {
            SpectrumSource::Explicit(s) => s.lambda(i),
            SpectrumSource::Geometric { q, .. } => q.powf((i - 1) as f64),
            SpectrumSource::PowerLaw { p, .. } => (i as f64).powf(-p),
            SpectrumSource::Dyadic(d) => d.value_at(i),
        }
    }

    /// `λ_{k+1} + … + λ_n`.
    pub fn tail_sum(&self, k: usize) -> f64 {
        match self {
            SpectrumSource::Explicit(s) => s.tail_sum(k),
            SpectrumSource::Geometric { q, n } => {
                if k >= *n {
                    0.0
                } else {
                    // q^k (1 − q^{n−k}) / (1 − q)
                    q.powf(k as f64) * -((*n - k) as f64 * q.ln()).exp_m1() / (1.0 - q)
                }
            }
            SpectrumSource::PowerLaw { p, n } => {
                ((k + 1)..=*n).rev().map(|i| (i as f64).powf(-p)).sum()
            }
            SpectrumSource::Dyadic(d) => d.tail_sum(k),
        }
    }

    pub fn materialize(&self) -> Result<Spectrum> {
        match self {
            SpectrumSource::Explicit(s) => Ok(s.clone()),
            SpectrumSource::Geometric { q, n } => generate_geometric(*q, *n),
            SpectrumSource::PowerLaw { p, n } => generate_power_law(*p, *n),
            SpectrumSource::Dyadic(d) => Ok(d.materialize()),
        }
    }
}

fn parse_params<'a>(body: &'a str, expected: &[&str]) -> Result<Vec<&'a str>> {
    let mut found: Vec<Option<&str>> = vec![None; expected.len()];
    for part in body.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
        let slot = expected
            .iter()
            .position(|e| *e == key.trim())
            .ok_or_else(|| Error::Parse(format!("unknown parameter {:?}", key.trim())))?;
        if found[slot].replace(value.trim()).is_some() {
            return Err(Error::Parse(format!("parameter {key:?} given twice")));
        }
    }
    found
        .into_iter()
        .zip(expected)
        .map(|(v, k)| v.ok_or_else(|| Error::Parse(format!("missing parameter {k:?}"))))
        .collect()
}

fn parse_num<T: FromStr>(name: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("cannot parse {name}={s:?}")))
}

impl FromStr for SpectrumSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("generator spec {s:?} has no ':'")))?;
        match kind.trim() {
            "geom" => {
                let p = parse_params(body, &["q", "n"])?;
                let (q, n) = (parse_num("q", p[0])?, parse_num("n", p[1])?);
                check_unit_interval("q", q)?;
                check_positive_len(n)?;
                Ok(SpectrumSource::Geometric { q, n })
            }
            "pow" => {
                let p = parse_params(body, &["p", "n"])?;
                let (exp, n) = (parse_num("p", p[0])?, parse_num("n", p[1])?);
                // validate eagerly
                generate_power_law(exp, 1)?;
                check_positive_len(n)?;
                Ok(SpectrumSource::PowerLaw { p: exp, n })
            }
            "dyadic" => {
                let p = parse_params(body, &["lmax", "base"])?;
                let spec = PiecewiseDyadicSpectrum::new(
                    parse_num("lmax", p[0])?,
                    parse_num("base", p[1])?,
                )?;
                Ok(SpectrumSource::Dyadic(spec))
            }
            other => Err(Error::Parse(format!(
                "unknown generator {other:?} (expected geom, pow or dyadic)"
            ))),
        }
    }
}
