//! Upper bounds on `e_{k+1}/e_k` and the expected CUR error they control.
//!
//! * The simple bound `e_{k+1} ≤ e_k · (λ_{k+1} + … + λ_n)` needs no structure.
//! * Geometric spectra have closed forms.
//! * For spectra dominated componentwise by a piecewise-dyadic majorant `μ`,
//!   monotonicity of `e_{k+1}/e_k` gives `ratio(λ) ≤ ratio(μ)`, and `ratio(μ)`
//!   is cheap at any length via [`esp_dyadic_convolution`].

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::esp::{esp_all, esp_dyadic_convolution, esp_dyadic_ratio, esp_geometric_ratio};
use crate::ext::ExtFloat;
use crate::spectra::{PiecewiseDyadicSpectrum, Spectrum, SpectrumSource};

/// Longest unstructured spectrum for which `bound_report` runs the direct recursion.
pub const DIRECT_RATIO_CAP: usize = 100_000;

/// `e_1(λ_{k+1}, …, λ_n)`, an upper bound on `e_{k+1}(λ)/e_k(λ)`.
///
/// Equal to the optimal rank-`k` error.
pub fn simple_bound(spec: &Spectrum, k: usize) -> Result<f64> {
    if k >= spec.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be smaller than the spectrum length {}",
            spec.len()
        )));
    }
    Ok(spec.tail_sum(k))
}

/// `(k+1) · e_{k+1}/e_k` for the spectrum `λ_i = q^i`, `i = 1, …, n`.
///
/// Evaluates `(k+1) · q · (q^k − q^n) / (1 − q^{k+1})`, equivalently
/// `(k+1) (q^{k+1} + … + q^n) / (1 + q + … + q^k)`. Note the ratio is
/// homogeneous of degree one, so the `(1, q, …, q^{n−1})` convention differs
/// by exactly the factor `q`.
pub fn geometric_expected_error(q: f64, n: usize, k: usize) -> Result<f64> {
    Ok((k + 1) as f64 * q * esp_geometric_ratio(q, n, k)?)
}

fn check_domination(source: &SpectrumSource, majorant: &PiecewiseDyadicSpectrum) -> Result<()> {
    for i in 1..=source.len() {
        let (value, bound) = (source.lambda(i), majorant.value_at(i));
        if value > bound {
            return Err(Error::BoundInapplicable {
                index: i,
                value,
                bound,
            });
        }
    }
    Ok(())
}

/// `e_{k+1}(μ)/e_k(μ)` for the dyadic majorant `μ(lmax, base)`, after checking
/// that `μ` dominates `spec` at every index.
pub fn dyadic_upper_bound(spec: &Spectrum, k: usize, base: f64, lmax: u32) -> Result<f64> {
    let majorant = PiecewiseDyadicSpectrum::new(lmax, base)?;
    dyadic_upper_bound_for(&SpectrumSource::Explicit(spec.clone()), k, &majorant)
}

pub fn dyadic_upper_bound_for(
    source: &SpectrumSource,
    k: usize,
    majorant: &PiecewiseDyadicSpectrum,
) -> Result<f64> {
    if k >= majorant.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be smaller than the majorant length {}",
            majorant.len()
        )));
    }
    check_domination(source, majorant)?;
    esp_dyadic_ratio(majorant, k)
}

/// `e_{k+1}/e_k` for `k = 0, …, kmax`, via the cheapest route the source allows.
///
/// Entries for `k` at or past the rank are `0.0` when `e_k > 0` and `NaN`
/// when `e_k` vanishes. Returns `None` for unstructured spectra longer than
/// `direct_cap`.
pub fn ratios_upto(
    source: &SpectrumSource,
    kmax: usize,
    direct_cap: usize,
) -> Result<Option<Vec<f64>>> {
    let esp = match source {
        SpectrumSource::Geometric { q, n } => {
            return (0..=kmax)
                .map(|k| {
                    if k < *n {
                        esp_geometric_ratio(*q, *n, k)
                    } else {
                        Ok(0.0)
                    }
                })
                .collect::<Result<Vec<_>>>()
                .map(Some);
        }
        SpectrumSource::Dyadic(d) => esp_dyadic_convolution(d, kmax + 1),
        other => {
            if other.len() > direct_cap {
                return Ok(None);
            }
            esp_all(&other.materialize()?, kmax + 1)
        }
    };
    Ok(Some(
        (0..=kmax)
            .map(|k| esp.ratio(k).unwrap_or(f64::NAN))
            .collect(),
    ))
}

/// Options for [`bound_report`].
#[derive(Clone, Debug)]
pub struct BoundOptions {
    pub majorant: Option<PiecewiseDyadicSpectrum>,
    pub direct_cap: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            majorant: None,
            direct_cap: DIRECT_RATIO_CAP,
        }
    }
}

/// The bound quantities for one `(spectrum, k)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub k: usize,
    pub exact_ratio: Option<f64>,
    pub simple_bound: f64,
    pub dyadic_bound: Option<f64>,
    pub expected_error: Option<f64>,
    pub optimal_error: f64,
}

impl BoundReport {
    pub const CSV_HEADER: [&'static str; 7] = [
        "n",
        "k",
        "exact_ratio",
        "simple_bound",
        "dyadic_bound",
        "expected_error",
        "optimal_error",
    ];

    /// Fields in [`Self::CSV_HEADER`] order; absent values are empty strings.
    pub fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
        vec![
            self.n.to_string(),
            self.k.to_string(),
            opt(self.exact_ratio),
            format_number(self.simple_bound),
            opt(self.dyadic_bound),
            opt(self.expected_error),
            format_number(self.optimal_error),
        ]
    }
}

/// Seventeen significant digits, `.` as decimal separator.
pub fn format_number(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.16e}")
}

/// Like [`format_number`], for values that may lie outside the double range.
pub fn format_ext(x: ExtFloat) -> String {
    let v = x.to_f64();
    if x.is_zero() || (v != 0.0 && v.is_finite()) {
        return format_number(v);
    }
    let mut e = (x.ln() / std::f64::consts::LN_10).floor() as i64;
    let scaled = |e: i64| {
        if e >= 0 {
            x.div(ExtFloat::powi(10.0, e as u64))
        } else {
            x.mul(ExtFloat::powi(10.0, e.unsigned_abs()))
        }
        .to_f64()
    };
    let mut m = scaled(e);
    if m.abs() >= 10.0 {
        e += 1;
        m = scaled(e);
    } else if m.abs() < 1.0 {
        e -= 1;
        m = scaled(e);
    }
    format!("{m:.16}e{e}")
}

pub fn bound_report(
    source: &SpectrumSource,
    k: usize,
    options: &BoundOptions,
) -> Result<BoundReport> {
    let n = source.len();
    if k >= n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be smaller than n = {n}"
        )));
    }
    let tail = source.tail_sum(k);
    let rank = match source {
        SpectrumSource::Explicit(s) => s.rank(),
        _ => n,
    };
    let exact_ratio = if k >= rank {
        Some(0.0)
    } else {
        ratios_upto(source, k, options.direct_cap)?.map(|r| r[k])
    };
    let dyadic_bound = options
        .majorant
        .as_ref()
        .map(|mu| dyadic_upper_bound_for(source, k, mu))
        .transpose()?;
    Ok(BoundReport {
        n,
        k,
        exact_ratio,
        simple_bound: tail,
        dyadic_bound,
        expected_error: exact_ratio.map(|r| (k + 1) as f64 * r),
        optimal_error: tail,
    })
}

/// One row of the ratio comparison between a spectrum and its dyadic majorant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FigureRow {
    pub k: usize,
    pub ratio_lambda: f64,
    pub ratio_mu: f64,
    pub simple_bound: f64,
}

impl FigureRow {
    pub const CSV_HEADER: [&'static str; 4] = ["k", "ratio_lambda", "ratio_mu", "simple_bound"];

    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            format_number(self.ratio_lambda),
            format_number(self.ratio_mu),
            format_number(self.simple_bound),
        ]
    }
}

/// `e_{k+1}/e_k` of `λ` and of its dyadic majorant `μ`, and the simple bound
/// of `λ`, over a range of `k`. `λ` and `μ` must have equal length and `μ`
/// must dominate `λ`.
pub fn figure_rows(
    lambda: &SpectrumSource,
    mu: &PiecewiseDyadicSpectrum,
    ks: RangeInclusive<usize>,
) -> Result<Vec<FigureRow>> {
    if lambda.len() != mu.len() {
        return Err(Error::InvalidParameter(format!(
            "spectrum length {} does not match majorant length {}",
            lambda.len(),
            mu.len()
        )));
    }
    let (kmin, kmax) = (*ks.start(), *ks.end());
    if kmin == 0 || kmin > kmax || kmax >= lambda.len() {
        return Err(Error::InvalidParameter(format!(
            "k range {kmin}..{kmax} must satisfy 1 <= kmin <= kmax < n = {}",
            lambda.len()
        )));
    }
    check_domination(lambda, mu)?;
    let ratio_lambda = ratios_upto(lambda, kmax, usize::MAX)?.expect("no cap");
    let mu_esp = esp_dyadic_convolution(mu, kmax + 1);
    ks.map(|k| {
        Ok(FigureRow {
            k,
            ratio_lambda: ratio_lambda[k],
            ratio_mu: mu_esp.ratio(k)?,
            simple_bound: lambda.tail_sum(k),
        })
    })
    .collect()
}
