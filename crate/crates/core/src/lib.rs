//! Rank-`k` approximation of symmetric positive semi-definite matrices by
//! volume-sampled CUR.
//!
//! Selecting `k` columns with probability proportional to the principal
//! minor `det M[S,S]` gives a CUR approximation whose expected nuclear-norm
//! error is exactly `(k+1) e_{k+1}(λ) / e_k(λ)`, a ratio of elementary
//! symmetric polynomials of the eigenvalues. This crate provides:
//!
//! * [`spectra`]: spectra, generators and head/tail splitting,
//! * [`esp`]: elementary symmetric polynomials, closed forms and the
//!   convolution calculus for structured spectra,
//! * [`psd`]: PSD matrices, Jacobi eigendecomposition, blocks, Schur
//!   complements and the CUR approximation itself,
//! * [`sampling`]: the volume-sampling law, an exact sampler and the
//!   expected-error evaluators,
//! * [`bounds`]: error bounds and report/figure data.

pub mod bounds;
pub mod error;
pub mod esp;
pub mod ext;
pub mod psd;
pub mod sampling;
pub mod spectra;

pub use bounds::{
    bound_report, dyadic_upper_bound, figure_rows, format_ext, format_number,
    geometric_expected_error, simple_bound, BoundOptions, BoundReport, FigureRow,
};
pub use error::{Error, ErrorKind, Result};
pub use esp::{
    esp_all, esp_convolve, esp_dyadic_convolution, esp_geometric_closed_form, esp_geometric_ratio,
    esp_of_source, esp_ratio, esp_ratio_head_tail, esp_scale, EspVector,
};
pub use ext::ExtFloat;
pub use psd::{
    cur_approximation, cur_error_nuclear, eigendecompose, invariant_sums, nuclear_norm,
    optimal_error, partition, schur_complement, BlockPartition, EigenDecomposition, PsdMatrix,
    Subset,
};
pub use sampling::{
    empirical_error, enumerate_distribution, expected_error_bruteforce, expected_error_exact,
    sample_subset, ErrorEstimate, VolumeDistribution, VolumeSampler,
};
pub use spectra::{
    concat, generate_dyadic, generate_geometric, generate_power_law, make_spectrum,
    split_head_tail, HeadTailSplit, PiecewiseDyadicSpectrum, Spectrum, SpectrumSource,
};
