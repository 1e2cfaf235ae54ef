//! Volume sampling of index sets and the expected CUR error.
//!
//! A `k`-subset `S` is drawn with probability `det M[S,S] / c_k(M)`, where
//! `c_k(M)` is the sum of all `k × k` principal minors. The expected nuclear
//! error of the resulting CUR approximation is then exactly
//! `(k+1) · c_{k+1}(M) / c_k(M) = (k+1) · e_{k+1}(λ) / e_k(λ)`.
//!
//! [`expected_error_bruteforce`] evaluates the expectation by summing over all
//! subsets and serves as the independent check of that identity.
//!
//! # Random streams
//!
//! Draw number `d` of a run seeded with `seed` uses
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `d`
//! (see [`draw_rng`]). Draws therefore do not depend on how they are
//! scheduled across threads, and a run is reproducible from its seed alone.

use itertools::Itertools;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::esp::esp_ratio;
use crate::ext::ExtFloat;
use crate::psd::{cur_error_nuclear, principal_minor, EigenDecomposition, PsdMatrix, Subset};
use crate::spectra::Spectrum;

/// Largest number of subsets [`enumerate_distribution`] will visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// `C(n, k)` exactly, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The volume-sampling law over `k`-subsets of `{1, …, n}`.
#[derive(Clone, Debug)]
pub struct VolumeDistribution {
    pub k: usize,
    pub n: usize,
    /// `(S, det M[S,S])` for every `k`-subset, in lexicographic order.
    pub weights: Vec<(Subset, f64)>,
    /// `Σ_S det M[S,S]`.
    pub normalizer: f64,
}

impl VolumeDistribution {
    pub fn weight(&self, s: &Subset) -> f64 {
        self.weights
            .binary_search_by(|(t, _)| t.cmp(s))
            .map_or(0.0, |i| self.weights[i].1)
    }

    pub fn probability(&self, s: &Subset) -> f64 {
        self.weight(s) / self.normalizer
    }

    /// `(S, p(S))` for subsets of nonzero probability.
    pub fn support(&self) -> impl Iterator<Item = (&Subset, f64)> + '_ {
        self.weights
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(move |(s, w)| (s, w / self.normalizer))
    }
}

fn check_k(m: &PsdMatrix, k: usize) -> Result<()> {
    if k == 0 || k > m.n() {
        return Err(Error::InvalidParameter(format!(
            "k must lie in 1..={}, got {k}",
            m.n()
        )));
    }
    Ok(())
}

/// Every `k × k` principal minor of `M`, with the default cap.
pub fn enumerate_distribution(m: &PsdMatrix, k: usize) -> Result<VolumeDistribution> {
    enumerate_distribution_capped(m, k, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_distribution_capped(
    m: &PsdMatrix,
    k: usize,
    cap: u128,
) -> Result<VolumeDistribution> {
    check_k(m, k)?;
    let n = m.n();
    let count = binomial(n, k);
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let subsets: Vec<Subset> = (0..n)
        .combinations(k)
        .map(Subset::from_sorted_unchecked)
        .collect();
    let weights = subsets
        .into_par_iter()
        .map(|s| principal_minor(m, &s).map(|w| (s, w)))
        .collect::<Result<Vec<_>>>()?;
    let normalizer: f64 = weights.iter().map(|(_, w)| w).sum();
    if !(normalizer > 0.0) {
        return Err(Error::DegenerateDistribution { k, rank: m.rank() });
    }
    Ok(VolumeDistribution {
        k,
        n,
        weights,
        normalizer,
    })
}

/// The RNG for draw number `draw` of a run seeded with `seed`.
pub fn draw_rng(seed: u64, draw: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw);
    rng
}

/// Exact volume sampler built on the eigendecomposition.
///
/// Volume sampling with `det M[S,S]` is the `k`-DPP with kernel `M`. A draw
/// first picks `k` eigenvectors, eigenvector set `J` with probability
/// `Π_{j∈J} λ_j / e_k(λ)`, walking the spectrum backwards and using partial
/// elementary symmetric polynomials as conditional weights; it then picks
/// indices one at a time from the projection onto those eigenvectors,
/// eliminating the chosen coordinate after each step.
#[derive(Clone, Debug)]
pub struct VolumeSampler {
    k: usize,
    vectors: nalgebra::DMatrix<f64>,
    /// `λ_i / λ_1`.
    scaled: Vec<f64>,
    /// `partial[i][l] = e_l(scaled[..i])`.
    partial: Vec<Vec<ExtFloat>>,
}

impl VolumeSampler {
    pub fn new(ed: &EigenDecomposition, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        if k > ed.rank {
            return Err(Error::DegenerateDistribution { k, rank: ed.rank });
        }
        let r = ed.rank;
        let top = ed.eigenvalues.max();
        let scaled: Vec<f64> = ed.eigenvalues.values().iter().map(|v| v / top).collect();
        let mut partial = vec![vec![ExtFloat::ZERO; k + 1]; r + 1];
        partial[0][0] = ExtFloat::ONE;
        for i in 1..=r {
            let t = ExtFloat::from_f64(scaled[i - 1]);
            partial[i][0] = ExtFloat::ONE;
            for l in 1..=k.min(i) {
                partial[i][l] = partial[i - 1][l].add(t.mul(partial[i - 1][l - 1]));
            }
        }
        Ok(VolumeSampler {
            k,
            vectors: ed.vectors.clone(),
            scaled,
            partial,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn choose_eigenvectors<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut remaining = self.k;
        let mut chosen = Vec::with_capacity(self.k);
        for i in (1..=self.scaled.len()).rev() {
            if remaining == 0 {
                break;
            }
            if remaining == i {
                chosen.extend((0..i).rev());
                break;
            }
            let p = ExtFloat::from_f64(self.scaled[i - 1])
                .mul(self.partial[i - 1][remaining - 1])
                .ratio(self.partial[i][remaining]);
            if rng.random::<f64>() < p {
                chosen.push(i - 1);
                remaining -= 1;
            }
        }
        chosen
    }

    /// One volume-sampled subset.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Subset {
        let n = self.vectors.nrows();
        let mut basis: Vec<DVector<f64>> = self
            .choose_eigenvectors(rng)
            .into_iter()
            .map(|j| self.vectors.column(j).into_owned())
            .collect();
        let mut picked = Vec::with_capacity(self.k);
        while !basis.is_empty() {
            let weights: Vec<f64> = (0..n)
                .map(|i| basis.iter().map(|v| v[i] * v[i]).sum())
                .collect();
            let total: f64 = weights.iter().sum();
            let mut target = rng.random::<f64>() * total;
            let mut index = weights
                .iter()
                .rposition(|&w| w > 0.0)
                .expect("nonempty basis has support");
            for (i, &w) in weights.iter().enumerate() {
                if target < w {
                    index = i;
                    break;
                }
                target -= w;
            }
            picked.push(index);

            let pivot_col = (0..basis.len())
                .max_by(|&a, &b| basis[a][index].abs().total_cmp(&basis[b][index].abs()))
                .expect("nonempty basis");
            let pivot = basis.swap_remove(pivot_col);
            for v in &mut basis {
                let factor = v[index] / pivot[index];
                v.axpy(-factor, &pivot, 1.0);
                v[index] = 0.0;
            }
            // modified Gram-Schmidt
            for j in 0..basis.len() {
                for i in 0..j {
                    let proj = basis[i].dot(&basis[j]);
                    let bi = basis[i].clone();
                    basis[j].axpy(-proj, &bi, 1.0);
                }
                let norm = basis[j].norm();
                basis[j] /= norm;
            }
        }
        picked.sort_unstable();
        Subset::from_sorted_unchecked(picked)
    }
}

/// A single volume-sampled subset; deterministic in `seed` (draw 0 of the run).
pub fn sample_subset(ed: &EigenDecomposition, k: usize, seed: u64) -> Result<Subset> {
    Ok(VolumeSampler::new(ed, k)?.sample(&mut draw_rng(seed, 0)))
}

/// `draws` independent subsets, draw `d` taken from stream `d` of `seed`.
pub fn sample_subsets(
    ed: &EigenDecomposition,
    k: usize,
    draws: usize,
    seed: u64,
) -> Result<Vec<Subset>> {
    let sampler = VolumeSampler::new(ed, k)?;
    Ok((0..draws as u64)
        .into_par_iter()
        .map(|d| sampler.sample(&mut draw_rng(seed, d)))
        .collect())
}

/// `(k+1) · e_{k+1}(λ) / e_k(λ)`: the expected nuclear error of volume-sampled CUR.
pub fn expected_error_exact(spec: &Spectrum, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    Ok((k + 1) as f64 * esp_ratio(spec, k)?)
}

/// `Σ_{S : p(S) > 0} p(S) · ‖M − M̂_S‖_*` by enumeration of all `k`-subsets.
pub fn expected_error_bruteforce(m: &PsdMatrix, k: usize) -> Result<f64> {
    expected_error_bruteforce_capped(m, k, DEFAULT_ENUMERATION_CAP)
}

pub fn expected_error_bruteforce_capped(m: &PsdMatrix, k: usize, cap: u128) -> Result<f64> {
    let dist = enumerate_distribution_capped(m, k, cap)?;
    let terms = dist
        .support()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(s, p)| cur_error_nuclear(m, s).map(|e| p * e))
        .collect::<Result<Vec<_>>>()?;
    Ok(terms.into_iter().sum())
}

/// Monte-Carlo estimate of the expected CUR error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorEstimate {
    pub mean: f64,
    /// Standard error of the mean; zero for a single draw.
    pub stderr: f64,
    pub draws: usize,
}

/// Averages `‖M − M̂_S‖_*` over `draws` volume-sampled subsets.
pub fn empirical_error(m: &PsdMatrix, k: usize, draws: usize, seed: u64) -> Result<ErrorEstimate> {
    if draws == 0 {
        return Err(Error::InvalidParameter("draws must be positive".into()));
    }
    check_k(m, k)?;
    let ed = crate::psd::eigendecompose(m);
    let sampler = VolumeSampler::new(&ed, k)?;
    let errors = (0..draws as u64)
        .into_par_iter()
        .map(|d| cur_error_nuclear(m, &sampler.sample(&mut draw_rng(seed, d))))
        .collect::<Result<Vec<f64>>>()?;
    let mean = errors.iter().sum::<f64>() / draws as f64;
    let stderr = if draws > 1 {
        let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        (var / draws as f64).sqrt()
    } else {
        0.0
    };
    Ok(ErrorEstimate {
        mean,
        stderr,
        draws,
    })
}
