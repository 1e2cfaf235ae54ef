//! Fixtures shared by the benchmarks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use volcur_core::{PsdMatrix, Spectrum};

/// `G Gᵀ` with `G` an `n × r` matrix of uniform entries in `[-1, 1)`.
pub fn random_gram(n: usize, r: usize, seed: u64) -> PsdMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, r, |_, _| rng.random_range(-1.0..1.0));
    PsdMatrix::new(&g * g.transpose()).expect("Gram matrices are PSD")
}

/// `n` eigenvalues drawn log-uniformly from `[1e-3, 1e3]`.
pub fn random_spectrum(n: usize, seed: u64) -> Spectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Spectrum::new(
        (0..n)
            .map(|_| 10f64.powf(rng.random_range(-3.0..3.0)))
            .collect(),
    )
    .expect("positive values")
}
