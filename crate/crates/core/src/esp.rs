//! Elementary symmetric polynomials of spectra.
//!
//! An [`EspVector`] holds `(e_0, e_1, …, e_m)` of some spectrum, truncated at
//! degree `m`. Coefficients are stored as [`ExtFloat`] so that long or steeply
//! decaying spectra do not underflow; ratios `e_{k+1}/e_k` are the quantity of
//! interest and stay well inside the double range.
//!
//! Besides the direct `O(n·m)` recursion this module provides the algebra that
//! makes structured spectra cheap:
//!
//! * concatenating spectra multiplies their generating polynomials
//!   ([`esp_convolve`]),
//! * scaling a spectrum by `s` multiplies `e_j` by `s^j` ([`esp_scale`]),
//! * `n` equal values `v` have `e_j = C(n, j) v^j`, which together with the
//!   first rule gives [`esp_dyadic_convolution`].

use crate::error::{Error, Result};
use crate::ext::{pow2_floor, ExtFloat};
use crate::spectra::{HeadTailSplit, PiecewiseDyadicSpectrum, Spectrum, SpectrumSource};

/// Coefficients `e_0 … e_m` of `Π (1 + λ_i x)`, truncated at degree `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct EspVector {
    coeffs: Vec<ExtFloat>,
}

impl EspVector {
    /// The coefficient vector of the empty spectrum, `(1, 0, …, 0)`.
    pub fn identity(m: usize) -> Self {
        let mut coeffs = vec![ExtFloat::ZERO; m + 1];
        coeffs[0] = ExtFloat::ONE;
        EspVector { coeffs }
    }

    /// Wraps explicit coefficients. `values[0]` must be 1 and all entries
    /// nonnegative.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.first() != Some(&1.0) {
            return Err(Error::InvalidParameter(
                "an ESP vector must start with e_0 = 1".into(),
            ));
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::NegativeEntry { index, value });
        }
        Ok(EspVector {
            coeffs: values.iter().map(|&v| ExtFloat::from_f64(v)).collect(),
        })
    }

    /// Highest stored degree `m`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `e_j` in extended range.
    ///
    /// # Panics
    ///
    /// If `j` exceeds the truncation.
    pub fn coeff(&self, j: usize) -> ExtFloat {
        self.coeffs[j]
    }

    /// `e_j` as a double (saturating to 0 or ∞ outside the double range).
    pub fn get(&self, j: usize) -> f64 {
        self.coeff(j).to_f64()
    }

    pub fn coeffs(&self) -> &[ExtFloat] {
        &self.coeffs
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// `e_{k+1} / e_k`.
    pub fn ratio(&self, k: usize) -> Result<f64> {
        if k + 1 > self.truncation() {
            return Err(Error::InvalidParameter(format!(
                "ratio e_{}/e_{k} needs truncation >= {}, have {}",
                k + 1,
                k + 1,
                self.truncation()
            )));
        }
        let den = self.coeffs[k];
        if !den.is_positive() {
            return Err(Error::RankDeficient { k });
        }
        Ok(self.coeffs[k + 1].ratio(den))
    }

    pub fn truncated(&self, m: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(m + 1, ExtFloat::ZERO);
        EspVector { coeffs }
    }
}

// Bail-out thresholds for the double-precision recursion.
const FAST_MAX: f64 = 1e280;
const FAST_MIN: f64 = 1e-290;

/// Recursion on `λ_i / unit` in plain doubles. Returns `None` if any coefficient
/// that should be positive leaves the safe range.
fn recursion_f64(values: &[f64], m: usize, unit: f64) -> Option<Vec<f64>> {
    let mut c = vec![0.0; m + 1];
    c[0] = 1.0;
    let mut active = 0usize;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        let t = v / unit;
        active += 1;
        let top = active.min(m);
        for j in (1..=top).rev() {
            c[j] += t * c[j - 1];
        }
        if c[top] > FAST_MAX {
            return None;
        }
    }
    let positive = active.min(m);
    if c[1..=positive]
        .iter()
        .any(|&x| !(FAST_MIN..=FAST_MAX).contains(&x))
    {
        return None;
    }
    Some(c)
}

fn recursion_ext(values: &[f64], m: usize, unit: f64) -> Vec<ExtFloat> {
    let mut c = vec![ExtFloat::ZERO; m + 1];
    c[0] = ExtFloat::ONE;
    let mut active = 0usize;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        let t = ExtFloat::from_f64(v / unit);
        active += 1;
        for j in (1..=active.min(m)).rev() {
            c[j] = c[j].add(t.mul(c[j - 1]));
        }
    }
    c
}

/// `(e_0(s), …, e_m(s))` by the one-pass recursion `e_j ← e_j + λ·e_{j−1}`.
///
/// The spectrum is normalised by the power of two just below `λ_1` first (an
/// exact operation); the scale is restored exactly as a factor `unit^j`. Costs `O(n·m)`; coefficients beyond `n` are exact zeros.
pub fn esp_all(s: &Spectrum, m: usize) -> EspVector {
    if s.max() == 0.0 {
        return EspVector::identity(m);
    }
    let unit = pow2_floor(s.max());
    let normalised: Vec<ExtFloat> = match recursion_f64(s.values(), m, unit) {
        Some(c) => c.into_iter().map(ExtFloat::from_f64).collect(),
        None => recursion_ext(s.values(), m, unit),
    };
    let unit = ExtFloat::from_f64(unit);
    let mut power = ExtFloat::ONE;
    let coeffs = normalised
        .into_iter()
        .map(|c| {
            let out = c.mul(power);
            power = power.mul(unit);
            out
        })
        .collect();
    EspVector { coeffs }
}

/// `e_{k+1}(s) / e_k(s)`.
///
/// Fails with [`Error::RankDeficient`] when `e_k(s) = 0`, i.e. when `s` has
/// fewer than `k` positive entries.
pub fn esp_ratio(s: &Spectrum, k: usize) -> Result<f64> {
    if k >= s.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be smaller than the spectrum length {}",
            s.len()
        )));
    }
    esp_all(s, k + 1).ratio(k)
}

fn check_geometric(q: f64, n: usize) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in (0, 1), got {q}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    Ok(())
}

/// `1 − q^j` without cancellation for `q` near 1.
fn one_minus_pow(q: f64, j: usize) -> f64 {
    -(j as f64 * q.ln()).exp_m1()
}

/// `e_k(1, q, …, q^{n−1}) = q^{k(k−1)/2} Π_{i=1..k} (1 − q^{n−i+1}) / (1 − q^i)`,
/// in extended range.
pub fn esp_geometric_closed_form_ext(q: f64, n: usize, k: usize) -> Result<ExtFloat> {
    check_geometric(q, n)?;
    if k > n {
        return Ok(ExtFloat::ZERO);
    }
    let mut acc = ExtFloat::powi(q, (k * k.saturating_sub(1) / 2) as u64);
    for i in 1..=k {
        acc = acc.mul_f64(one_minus_pow(q, n - i + 1) / one_minus_pow(q, i));
    }
    Ok(acc)
}

/// Closed form of `e_k(1, q, …, q^{n−1})`; zero for `k > n`.
pub fn esp_geometric_closed_form(q: f64, n: usize, k: usize) -> Result<f64> {
    esp_geometric_closed_form_ext(q, n, k).map(ExtFloat::to_f64)
}

/// `e_{k+1}/e_k` of `(1, q, …, q^{n−1})`, i.e. `(q^k − q^n) / (1 − q^{k+1})`.
pub fn esp_geometric_ratio(q: f64, n: usize, k: usize) -> Result<f64> {
    check_geometric(q, n)?;
    if k >= n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be smaller than n = {n}"
        )));
    }
    let qk = ExtFloat::powi(q, k as u64);
    Ok(qk
        .mul_f64(one_minus_pow(q, n - k) / one_minus_pow(q, k + 1))
        .to_f64())
}

/// Cauchy product of two coefficient vectors truncated at degree `m`.
///
/// If `a = f(x)` and `b = f(y)` then the result is `f` of the concatenated
/// spectrum.
pub fn esp_convolve(a: &EspVector, b: &EspVector, m: usize) -> EspVector {
    let (la, lb) = (a.truncation(), b.truncation());
    let coeffs = (0..=m)
        .map(|t| {
            let lo = t.saturating_sub(lb);
            let hi = t.min(la);
            (lo..=hi).fold(ExtFloat::ZERO, |acc, i| {
                acc.add(a.coeffs[i].mul(b.coeffs[t - i]))
            })
        })
        .collect();
    EspVector { coeffs }
}

/// Coefficients of the spectrum scaled by `s`: `e_j ↦ s^j e_j`.
pub fn esp_scale(v: &EspVector, s: f64) -> Result<EspVector> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scale must be positive, got {s}"
        )));
    }
    let s = ExtFloat::from_f64(s);
    let mut power = ExtFloat::ONE;
    let coeffs = v
        .coeffs
        .iter()
        .map(|c| {
            let out = c.mul(power);
            power = power.mul(s);
            out
        })
        .collect();
    Ok(EspVector { coeffs })
}

/// `e_{k+1}/e_k` assembled from the head `λ_1..λ_k` and the normalised tail `ρ`.
///
/// With `u = f(head)`, `w = f(ρ)` and pivot `p = λ_{k+1}`:
///
/// ```text
/// γ = Σ_{i=0..k} p^{k−i} w_{k+1−i} u_i  /  Σ_{i=0..k} p^{k−i} w_{k−i} u_i
/// e_{k+1}/e_k = γ · p
/// ```
///
/// Returns `(γ, γ·p)`.
pub fn esp_ratio_head_tail(split: &HeadTailSplit, k: usize) -> Result<(f64, f64)> {
    if split.k != k {
        return Err(Error::InvalidParameter(format!(
            "split was taken at k = {}, ratio requested for k = {k}",
            split.k
        )));
    }
    if split.pivot <= 0.0 {
        return Err(Error::DegenerateTail { k });
    }
    let head = esp_all(&split.head, k);
    let w = esp_all(&split.rho, k + 1);
    let mut num = ExtFloat::ZERO;
    let mut den = ExtFloat::ZERO;
    for i in 0..=k {
        let weight = ExtFloat::powi(split.pivot, (k - i) as u64).mul(head.coeffs[i]);
        num = num.add(weight.mul(w.coeffs[k + 1 - i]));
        den = den.add(weight.mul(w.coeffs[k - i]));
    }
    if !den.is_positive() {
        return Err(Error::RankDeficient { k });
    }
    let gamma = num.ratio(den);
    Ok((gamma, gamma * split.pivot))
}

/// `f` of level `l` of a dyadic spectrum: `2^l` copies of `base^l`, so
/// `u_j = C(2^l, j) · base^{l·j}`, truncated at `m`.
pub fn dyadic_level(spec: &PiecewiseDyadicSpectrum, l: u32, m: usize) -> EspVector {
    let size = spec.level_size(l);
    let value = ExtFloat::powi(spec.base(), l as u64);
    let mut coeffs = vec![ExtFloat::ZERO; m + 1];
    coeffs[0] = ExtFloat::ONE;
    let top = (m as u64).min(size) as usize;
    for j in 1..=top {
        let binom_step = (size - j as u64 + 1) as f64 / j as f64;
        coeffs[j] = coeffs[j - 1].mul(value).mul_f64(binom_step);
    }
    EspVector { coeffs }
}

/// `f(μ)` for the dyadic spectrum as the product of its per-level factors.
///
/// Costs `O(lmax·(m+1)²)` independently of `n = 2^lmax − 1`.
pub fn esp_dyadic_convolution(spec: &PiecewiseDyadicSpectrum, m: usize) -> EspVector {
    (0..spec.lmax()).fold(EspVector::identity(m), |acc, l| {
        esp_convolve(&acc, &dyadic_level(spec, l, m), m)
    })
}

/// `e_{k+1}(μ)/e_k(μ)` via [`esp_dyadic_convolution`].
pub fn esp_dyadic_ratio(spec: &PiecewiseDyadicSpectrum, k: usize) -> Result<f64> {
    esp_dyadic_convolution(spec, k + 1).ratio(k)
}

/// `(e_0, …, e_m)` of a spectrum source, using the closed form or the dyadic
/// convolution when the source has that structure.
pub fn esp_of_source(source: &SpectrumSource, m: usize) -> Result<EspVector> {
    match source {
        SpectrumSource::Geometric { q, n } => Ok(EspVector {
            coeffs: (0..=m)
                .map(|j| esp_geometric_closed_form_ext(*q, *n, j))
                .collect::<Result<_>>()?,
        }),
        SpectrumSource::Dyadic(d) => Ok(esp_dyadic_convolution(d, m)),
        other => Ok(esp_all(&other.materialize()?, m)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{
        concat, generate_dyadic, generate_geometric, make_spectrum, split_head_tail,
    };
    use proptest::prelude::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    }

    /// Sum over all subsets of size j of the product of their entries.
    fn brute_force_esp(values: &[f64], m: usize) -> Vec<f64> {
        let n = values.len();
        let mut out = vec![0.0; m + 1];
        for mask in 0u32..(1 << n) {
            let j = mask.count_ones() as usize;
            if j <= m {
                out[j] += (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| values[i])
                    .product::<f64>();
            }
        }
        out
    }

    fn spec(v: &[f64]) -> Spectrum {
        make_spectrum(v).unwrap()
    }

    #[test]
    fn brute_force_oracle_values() {
        assert_eq!(brute_force_esp(&[1.0, 2.0, 3.0], 3), [1.0, 6.0, 11.0, 6.0]);
        assert_eq!(brute_force_esp(&[4.0, 2.0, 1.0], 2), [1.0, 7.0, 14.0]);
    }

    #[test]
    fn esp_all_examples() {
        assert_eq!(
            esp_all(&spec(&[1.0, 2.0, 3.0]), 3).to_vec(),
            [1.0, 6.0, 11.0, 6.0]
        );
        assert_eq!(esp_all(&spec(&[5.0]), 2).to_vec(), [1.0, 5.0, 0.0]);
        let ones = spec(&[1.0; 10]);
        let e = esp_all(&ones, 10);
        let mut binom = 1.0;
        for k in 0..=10 {
            assert_eq!(e.get(k), binom, "C(10,{k})");
            binom = binom * (10 - k) as f64 / (k + 1) as f64;
        }
        assert_eq!(esp_all(&spec(&[0.0, 0.0]), 2).to_vec(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn esp_ratio_examples() {
        assert!(rel_err(esp_ratio(&spec(&[1.0, 2.0, 3.0]), 1).unwrap(), 11.0 / 6.0) < 1e-15);
        assert!(rel_err(esp_ratio(&spec(&[1.0, 0.5]), 1).unwrap(), 1.0 / 3.0) < 1e-15);
        let c = 0.7;
        let n = 9;
        for k in 0..n {
            let r = esp_ratio(&spec(&vec![c; n]), k).unwrap();
            assert!(
                rel_err(r, c * (n - k) as f64 / (k + 1) as f64) < 1e-13,
                "k = {k}"
            );
        }
        assert!(matches!(
            esp_ratio(&spec(&[1.0, 0.0, 0.0]), 2),
            Err(Error::RankDeficient { k: 2 })
        ));
        assert!(esp_ratio(&spec(&[1.0]), 1).is_err());
    }

    #[test]
    fn wide_range_falls_back_to_extended_recursion() {
        // C(3000, 1500) ~ 1e901, far beyond f64
        let s = spec(&vec![1.0; 3000]);
        let r = esp_ratio(&s, 1500).unwrap();
        assert!(rel_err(r, 1500.0 / 1501.0) < 1e-10);
        // steeply decaying: e_k ~ 10^{-k(k-1)/2}
        let g = generate_geometric(0.1, 64).unwrap();
        let r = esp_ratio(&g, 40).unwrap();
        assert!(rel_err(r, esp_geometric_ratio(0.1, 64, 40).unwrap()) < 1e-12);
    }

    #[test]
    fn geometric_closed_form_examples() {
        assert!(rel_err(esp_geometric_closed_form(0.5, 2, 2).unwrap(), 0.5) < 1e-15);
        assert_eq!(esp_geometric_closed_form(0.3, 7, 0).unwrap(), 1.0);
        assert!(rel_err(esp_geometric_closed_form(0.5, 2, 1).unwrap(), 1.5) < 1e-15);
        assert_eq!(esp_geometric_closed_form(0.5, 2, 3).unwrap(), 0.0);
        assert!(esp_geometric_closed_form(1.0, 2, 1).is_err());
    }

    #[test]
    fn geometric_ratio_examples() {
        assert!(rel_err(esp_geometric_ratio(0.5, 2, 1).unwrap(), 1.0 / 3.0) < 1e-15);
        let q = 1e-6;
        assert!(rel_err(esp_geometric_ratio(q, 10, 3).unwrap(), q.powi(3)) < 1e-5);
        let g = generate_geometric(0.9, 50).unwrap();
        let direct = esp_ratio(&g, 5).unwrap();
        assert!(rel_err(esp_geometric_ratio(0.9, 50, 5).unwrap(), direct) < 1e-12);
        assert!(esp_geometric_ratio(0.5, 3, 3).is_err());
    }

    #[test]
    fn convolve_examples() {
        let f = esp_all(&spec(&[3.0, 1.0]), 3);
        assert_eq!(esp_convolve(&f, &EspVector::identity(3), 3), f);
        let g = esp_all(&spec(&[2.0]), 3);
        assert_eq!(esp_convolve(&f, &g, 3).to_vec(), [1.0, 6.0, 11.0, 6.0]);
        let one = esp_all(&spec(&[1.0]), 1);
        assert_eq!(esp_convolve(&one, &one, 2).to_vec(), [1.0, 2.0, 1.0]);
    }

    #[test]
    fn scale_examples() {
        let v = EspVector::from_values(&[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(esp_scale(&v, 1.0).unwrap(), v);
        assert_eq!(esp_scale(&v, 2.0).unwrap().to_vec(), [1.0, 4.0, 4.0]);
        assert_eq!(esp_all(&spec(&[2.0, 2.0]), 2).to_vec(), [1.0, 4.0, 4.0]);
        let v = EspVector::from_values(&[1.0, 0.5, 0.25]).unwrap();
        assert_eq!(esp_scale(&v, 3.0).unwrap().to_vec(), [1.0, 1.5, 2.25]);
        assert!(esp_scale(&v, 0.0).is_err());
        assert!(EspVector::from_values(&[2.0, 1.0]).is_err());
    }

    #[test]
    fn head_tail_examples() {
        let s = spec(&[4.0, 2.0, 1.0]);
        let (gamma, ratio) = esp_ratio_head_tail(&split_head_tail(&s, 1).unwrap(), 1).unwrap();
        assert!(rel_err(ratio, 2.0) < 1e-15);
        assert!(rel_err(gamma, 1.0) < 1e-15);

        let c = 1.5;
        let n = 8;
        let s = spec(&vec![c; n]);
        for k in 0..n {
            let (_, ratio) = esp_ratio_head_tail(&split_head_tail(&s, k).unwrap(), k).unwrap();
            assert!(rel_err(ratio, c * (n - k) as f64 / (k + 1) as f64) < 1e-13);
        }

        // tail of length one: w = (1, 1)
        let s = spec(&[5.0, 3.0, 2.0, 0.5]);
        let split = split_head_tail(&s, 3).unwrap();
        assert_eq!(esp_all(&split.rho, 4).to_vec(), [1.0, 1.0, 0.0, 0.0, 0.0]);
        let (_, ratio) = esp_ratio_head_tail(&split, 3).unwrap();
        let brute = brute_force_esp(s.values(), 4);
        assert!(rel_err(ratio, brute[4] / brute[3]) < 1e-15);

        assert!(esp_ratio_head_tail(&split, 2).is_err());
    }

    #[test]
    fn dyadic_examples() {
        let (d, mu) = generate_dyadic(2, 0.25).unwrap();
        assert_eq!(esp_dyadic_convolution(&d, 3), esp_all(&mu, 3));

        let (d, _) = generate_dyadic(1, 0.4).unwrap();
        assert_eq!(
            esp_dyadic_convolution(&d, 4).to_vec(),
            [1.0, 1.0, 0.0, 0.0, 0.0]
        );

        let (d, mu) = generate_dyadic(10, 0.25).unwrap();
        let fast = esp_dyadic_convolution(&d, 8);
        let direct = esp_all(&mu, 8);
        for j in 0..=8 {
            assert!(rel_err(fast.get(j), direct.get(j)) < 1e-12, "j = {j}");
        }
    }

    #[test]
    fn dyadic_level_is_binomial() {
        let d = crate::spectra::PiecewiseDyadicSpectrum::new(5, 0.5).unwrap();
        // level 2: four copies of 0.25
        assert_eq!(
            dyadic_level(&d, 2, 5).to_vec(),
            [
                1.0,
                4.0 * 0.25,
                6.0 * 0.0625,
                4.0 * 0.015625,
                0.00390625,
                0.0
            ]
        );
    }

    fn small_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..5.0, 1..=12)
    }

    #[test]
    fn source_coefficients_match_materialised_recursion() {
        for src in [
            SpectrumSource::Geometric { q: 0.6, n: 20 },
            SpectrumSource::PowerLaw { p: 1.5, n: 40 },
            SpectrumSource::Dyadic(PiecewiseDyadicSpectrum::new(6, 0.25).unwrap()),
        ] {
            let fast = esp_of_source(&src, 8).unwrap();
            let direct = esp_all(&src.materialize().unwrap(), 8);
            for j in 0..=8 {
                assert!(
                    (fast.coeff(j).ratio(direct.coeff(j)) - 1.0).abs() < 1e-12,
                    "{src:?} j={j}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn recursion_matches_subset_enumeration(v in small_values()) {
            let m = v.len();
            let brute = brute_force_esp(&v, m);
            let e = esp_all(&Spectrum::new(v).unwrap(), m);
            for j in 0..=m {
                prop_assert!(rel_err(e.get(j), brute[j]) < 1e-12);
                prop_assert!(e.get(j) >= 0.0);
            }
        }

        #[test]
        fn convolution_theorem(x in small_values(), y in small_values()) {
            let (x, y) = (Spectrum::new(x).unwrap(), Spectrum::new(y).unwrap());
            let m = x.len() + y.len();
            let lhs = esp_convolve(&esp_all(&x, m), &esp_all(&y, m), m);
            let rhs = esp_all(&concat(&x, &y), m);
            for j in 0..=m {
                prop_assert!(rel_err(lhs.get(j), rhs.get(j)) < 1e-12);
            }
        }

        #[test]
        fn scaling_lemma(x in small_values(), s in prop::sample::select(vec![1e-3, 1.0, 1e3])) {
            let x = Spectrum::new(x).unwrap();
            let m = x.len();
            let lhs = esp_scale(&esp_all(&x, m), s).unwrap();
            let rhs = esp_all(&x.scaled(s).unwrap(), m);
            for j in 0..=m {
                prop_assert!(rel_err(lhs.get(j), rhs.get(j)) < 1e-12);
            }
        }

        #[test]
        fn head_tail_matches_direct(v in prop::collection::vec(0.01f64..5.0, 2..=16), k in 0usize..16) {
            let s = Spectrum::new(v).unwrap();
            let k = k % s.len();
            let (_, ratio) = esp_ratio_head_tail(&split_head_tail(&s, k).unwrap(), k).unwrap();
            prop_assert!(rel_err(ratio, esp_ratio(&s, k).unwrap()) < 1e-10);
        }

        #[test]
        fn simple_bound_holds(v in prop::collection::vec(0.0f64..5.0, 2..=16), k in 0usize..16) {
            let s = Spectrum::new(v).unwrap();
            let k = k % (s.len() - 1);
            let e = esp_all(&s, k + 1);
            let lhs = e.get(k + 1);
            let rhs = e.get(k) * s.tail_sum(k);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
        }
    }
}
