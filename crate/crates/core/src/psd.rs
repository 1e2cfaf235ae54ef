//! Dense symmetric positive semi-definite matrices and the CUR construction.
//!
//! For a selected index set `S` (size `k`) the matrix splits, after moving the
//! selected rows and columns to the front, into
//!
//! ```text
//!     [ A  Bᵀ ]        A = M[S, S],  B = M[S̄, S],  C = M[S̄, S̄]
//!     [ B  C  ]
//! ```
//!
//! and the CUR approximation replaces `C` by `B A⁻¹ Bᵀ`. The error
//! `C − B A⁻¹ Bᵀ` is a Schur complement and therefore PSD, so its nuclear norm
//! is its trace.
//!
//! Index sets are used instead of permutation matrices: every quantity here
//! depends only on which indices are selected, not on their order.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::esp::esp_all;
use crate::spectra::Spectrum;

/// Off-diagonal stopping threshold for the Jacobi solver, relative to `‖M‖_F`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 30;
/// Smallest admissible eigenvalue on construction, relative to `λ_max`.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Eigenvalues at or below `RANK_TOLERANCE · λ_max` do not count towards rank.
pub const RANK_TOLERANCE: f64 = 1e-12;
/// Cholesky pivots below `PIVOT_TOLERANCE · λ_max` mark a singular block.
pub const PIVOT_TOLERANCE: f64 = 1e-14;
/// Relative asymmetry accepted (and removed) on construction.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// `M = Q Λ Qᵀ` restricted to the numerically nonzero part.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// `n × r`, orthonormal columns.
    pub vectors: DMatrix<f64>,
    /// The `r` eigenvalues above the rank threshold.
    pub eigenvalues: Spectrum,
    pub rank: usize,
    /// All `n` eigenvalues, tiny negative round-off clamped to zero.
    pub full_spectrum: Spectrum,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    /// `Q diag(Λ) Qᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.eigenvalues.values().iter().enumerate() {
            scaled.column_mut(j).scale_mut(l);
        }
        &scaled * self.vectors.transpose()
    }
}

/// A validated symmetric PSD matrix together with its eigendecomposition.
#[derive(Clone, Debug)]
pub struct PsdMatrix {
    entries: DMatrix<f64>,
    eig: EigenDecomposition,
}

impl PsdMatrix {
    /// Validates squareness, finiteness, symmetry and semi-definiteness.
    ///
    /// Asymmetry up to [`SYMMETRY_TOLERANCE`] (relative to the largest entry)
    /// is averaged away; anything larger is rejected. Matrices with an
    /// eigenvalue below `−PSD_TOLERANCE · λ_max` are rejected, never projected.
    pub fn new(mut entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty);
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        let scale = entries.amax();
        for i in 0..rows {
            for j in (i + 1)..rows {
                let (a, b) = (entries[(i, j)], entries[(j, i)]);
                if (a - b).abs() > SYMMETRY_TOLERANCE * scale {
                    return Err(Error::NotSymmetric {
                        row: i + 1,
                        col: j + 1,
                    });
                }
                let mean = 0.5 * (a + b);
                entries[(i, j)] = mean;
                entries[(j, i)] = mean;
            }
        }
        let (values, vectors) = jacobi_eigen(&entries)?;
        let max = values[0].max(0.0);
        let min = values[rows - 1];
        if min < -PSD_TOLERANCE * max || (max == 0.0 && min < 0.0) {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                max_eigenvalue: values[0],
            });
        }
        let rank = values
            .iter()
            .take_while(|&&v| v > RANK_TOLERANCE * max)
            .count();
        let clamped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
        let eig = EigenDecomposition {
            vectors: vectors.columns(0, rank).into_owned(),
            eigenvalues: Spectrum::from_sorted_unchecked(clamped[..rank].to_vec()),
            rank,
            full_spectrum: Spectrum::from_sorted_unchecked(clamped),
        };
        Ok(PsdMatrix { entries, eig })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows_to_matrix(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is PSD")
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(values),
        ))
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eig.full_spectrum.max()
    }

    pub fn rank(&self) -> usize {
        self.eig.rank
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.eig.full_spectrum
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi iteration. Returns eigenvalues in nonincreasing order with
/// the matching eigenvectors as columns.
pub fn jacobi_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "jacobi_eigen needs a square matrix");
    let mut a = m.clone();
    let mut v = DMatrix::identity(n, n);
    let target = JACOBI_TOLERANCE * a.norm();

    let mut sweep = 0;
    while off_diagonal_norm(&a) > target {
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::NotConverged { sweeps: sweep });
        }
        sweep += 1;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

pub fn eigendecompose(m: &PsdMatrix) -> EigenDecomposition {
    m.eig.clone()
}

/// Nuclear norm of the best rank-`k` approximation error: `Σ_{i>k} λ_i`.
pub fn optimal_error(spec: &Spectrum, k: usize) -> Result<f64> {
    if k > spec.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the spectrum length {}",
            spec.len()
        )));
    }
    Ok(spec.tail_sum(k))
}

/// `(c_0(M), …, c_{up_to}(M))`, the sums of principal minors of each order,
/// evaluated as elementary symmetric polynomials of the eigenvalues.
pub fn invariant_sums(m: &PsdMatrix, up_to: usize) -> Result<Vec<f64>> {
    if up_to > m.n() {
        return Err(Error::InvalidParameter(format!(
            "up_to = {up_to} exceeds n = {}",
            m.n()
        )));
    }
    Ok(esp_all(m.spectrum(), up_to).to_vec())
}

/// `Σ λ_i`: the trace, since the singular values of a PSD matrix are its eigenvalues.
pub fn nuclear_norm(m: &PsdMatrix) -> f64 {
    m.trace()
}

/// A sorted set of distinct 0-based indices. Displays 1-based, comma-separated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(Vec<usize>);

impl Subset {
    /// Validates 0-based indices against dimension `n` and sorts them.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("subset must be nonempty".into()));
        }
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex { index: w[0] + 1 });
            }
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::IndexOutOfRange { index: last + 1, n });
            }
        }
        Ok(Subset(indices))
    }

    /// Builds from 1-based indices.
    pub fn from_one_based(indices: &[usize], n: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i == 0) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        Self::new(indices.iter().map(|i| i - 1).collect(), n)
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Subset(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn complement(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n.saturating_sub(self.len()));
        let mut sel = self.0.iter().peekable();
        for i in 0..n {
            if sel.peek() == Some(&&i) {
                sel.next();
            } else {
                out.push(i);
            }
        }
        out
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, i) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

/// Parses 1-based comma-separated indices. Range checks happen at use.
impl FromStr for Subset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let one_based = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad index {t:?} in subset {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_one_based(&one_based, usize::MAX)
    }
}

/// The `(A, B, C)` blocks for a selected index set.
#[derive(Clone, Debug)]
pub struct BlockPartition {
    pub subset: Subset,
    /// Unselected indices, ascending; row order of `B` and `C`.
    pub complement: Vec<usize>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

fn check_subset(m: &PsdMatrix, subset: &Subset) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidParameter("subset must be nonempty".into()));
    }
    match subset.indices().last() {
        Some(&last) if last >= m.n() => Err(Error::IndexOutOfRange {
            index: last + 1,
            n: m.n(),
        }),
        _ => Ok(()),
    }
}

pub fn partition(m: &PsdMatrix, subset: &Subset) -> Result<BlockPartition> {
    check_subset(m, subset)?;
    let sel = subset.indices();
    let rest = subset.complement(m.n());
    let e = &m.entries;
    Ok(BlockPartition {
        a: DMatrix::from_fn(sel.len(), sel.len(), |i, j| e[(sel[i], sel[j])]),
        b: DMatrix::from_fn(rest.len(), sel.len(), |i, j| e[(rest[i], sel[j])]),
        c: DMatrix::from_fn(rest.len(), rest.len(), |i, j| e[(rest[i], rest[j])]),
        subset: subset.clone(),
        complement: rest,
    })
}

/// `A = P L Lᵀ Pᵀ` with diagonal pivoting.
#[derive(Clone, Debug)]
pub(crate) struct PivotedCholesky {
    /// Lower triangular, rows and columns in pivot order.
    pub l: DMatrix<f64>,
    /// `perm[i]` is the original row of pivot position `i`.
    pub perm: Vec<usize>,
    /// Squared diagonal of `l`.
    pub pivots: Vec<f64>,
}

/// Fails with the largest remaining diagonal entry once it drops below `min_pivot`.
pub(crate) fn pivoted_cholesky(
    a: &DMatrix<f64>,
    min_pivot: f64,
) -> std::result::Result<PivotedCholesky, f64> {
    let k = a.nrows();
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut pivots = Vec::with_capacity(k);
    for j in 0..k {
        let (p, best) = (j..k)
            .map(|i| (i, w[(i, i)]))
            .fold(
                (j, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        if !(best >= min_pivot) || best <= 0.0 {
            return Err(best);
        }
        if p != j {
            w.swap_rows(j, p);
            w.swap_columns(j, p);
            perm.swap(j, p);
        }
        let d = w[(j, j)].sqrt();
        pivots.push(w[(j, j)]);
        w[(j, j)] = d;
        for i in (j + 1)..k {
            w[(i, j)] /= d;
        }
        // full trailing block, so later symmetric swaps see current values
        for c in (j + 1)..k {
            let lcj = w[(c, j)];
            for i in (j + 1)..k {
                w[(i, c)] -= w[(i, j)] * lcj;
            }
        }
    }
    for c in 1..k {
        for r in 0..c {
            w[(r, c)] = 0.0;
        }
    }
    Ok(PivotedCholesky { l: w, perm, pivots })
}

/// `det M[S, S]`, with numerically singular blocks reported as exactly zero.
pub fn principal_minor(m: &PsdMatrix, subset: &Subset) -> Result<f64> {
    check_subset(m, subset)?;
    let sel = subset.indices();
    let a = DMatrix::from_fn(sel.len(), sel.len(), |i, j| m.entries[(sel[i], sel[j])]);
    Ok(
        match pivoted_cholesky(&a, PIVOT_TOLERANCE * m.lambda_max()) {
            Ok(chol) => chol.pivots.iter().product(),
            Err(_) => 0.0,
        },
    )
}

/// `W = L⁻¹ Pᵀ Bᵀ`, so that `B A⁻¹ Bᵀ = Wᵀ W`.
fn whitened_cross_block(p: &BlockPartition, lambda_max: f64) -> Result<DMatrix<f64>> {
    let chol = pivoted_cholesky(&p.a, PIVOT_TOLERANCE * lambda_max).map_err(|smallest| {
        Error::SingularPivot {
            condition: if smallest > 0.0 {
                lambda_max / smallest
            } else {
                f64::INFINITY
            },
        }
    })?;
    let k = p.a.nrows();
    let cols = p.b.nrows();
    let mut w = DMatrix::from_fn(k, cols, |i, j| p.b[(j, chol.perm[i])]);
    for j in 0..cols {
        for i in 0..k {
            let mut x = w[(i, j)];
            for r in 0..i {
                x -= chol.l[(i, r)] * w[(r, j)];
            }
            w[(i, j)] = x / chol.l[(i, i)];
        }
    }
    Ok(w)
}

fn lambda_max_of(p: &BlockPartition) -> f64 {
    // λ_max(M) is not available from the blocks alone; the larger block trace stands in
    p.a.trace()
        .max(if p.c.is_empty() { 0.0 } else { p.c.trace() })
}

fn schur_from_parts(p: &BlockPartition, w: &DMatrix<f64>) -> DMatrix<f64> {
    let mut s = &p.c - w.transpose() * w;
    let n = s.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let mean = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = mean;
            s[(j, i)] = mean;
        }
    }
    s
}

/// `C − B A⁻¹ Bᵀ`, symmetrised.
///
/// The singularity test compares the smallest Cholesky pivot of `A` with a
/// scale of the blocks (trace of `A` or `C`). [`cur_error_nuclear`] and
/// friends use `λ_max(M)` instead.
pub fn schur_complement(p: &BlockPartition) -> Result<DMatrix<f64>> {
    let w = whitened_cross_block(p, lambda_max_of(p))?;
    Ok(schur_from_parts(p, &w))
}

/// Schur complement of `M[S, S]` in `M`, with the singularity test relative to `λ_max(M)`.
pub fn schur_complement_of(m: &PsdMatrix, subset: &Subset) -> Result<DMatrix<f64>> {
    let p = partition(m, subset)?;
    let w = whitened_cross_block(&p, m.lambda_max())?;
    Ok(schur_from_parts(&p, &w))
}

/// The rank-`|S|` CUR approximation `M̂` with blocks `(A, Bᵀ; B, B A⁻¹ Bᵀ)`
/// placed back at the original index positions.
pub fn cur_approximation(m: &PsdMatrix, subset: &Subset) -> Result<PsdMatrix> {
    let p = partition(m, subset)?;
    let w = whitened_cross_block(&p, m.lambda_max())?;
    let mut out = m.entries.clone();
    let rest = &p.complement;
    let bab = w.transpose() * &w;
    for (i, &ri) in rest.iter().enumerate() {
        for (j, &rj) in rest.iter().enumerate() {
            out[(ri, rj)] = 0.5 * (bab[(i, j)] + bab[(j, i)]);
        }
    }
    PsdMatrix::new(out)
}

/// `‖M − M̂‖_* = trace(C − B A⁻¹ Bᵀ)`.
pub fn cur_error_nuclear(m: &PsdMatrix, subset: &Subset) -> Result<f64> {
    let p = partition(m, subset)?;
    let w = whitened_cross_block(&p, m.lambda_max())?;
    Ok(p.c.trace() - w.norm_squared())
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(Error::Empty);
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(Error::Parse(format!(
            "row {} has {} entries, expected {cols}",
            i + 1,
            r.len()
        )));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

/// Parses a rectangular array: one row per line, entries separated by
/// whitespace and/or commas. Blank lines and `#` comments are skipped.
pub fn parse_dense(text: &str) -> Result<DMatrix<f64>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "line {}: cannot parse {t:?} as a number",
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    rows_to_matrix(&rows)
}

/// Parses and validates a symmetric PSD matrix.
pub fn parse_matrix(text: &str) -> Result<PsdMatrix> {
    PsdMatrix::new(parse_dense(text)?)
}

/// Normal matrix `XᵀX` of a data array with samples as rows.
pub fn gram_matrix(x: &DMatrix<f64>) -> Result<PsdMatrix> {
    PsdMatrix::new(x.transpose() * x)
}

/// Gaussian kernel `exp(−‖x_i − x_j‖² / 2σ²)` over the rows of `x`.
pub fn rbf_kernel(x: &DMatrix<f64>, sigma: f64) -> Result<PsdMatrix> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let n = x.nrows();
    let denom = 2.0 * sigma * sigma;
    let k = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            (-(x.row(i) - x.row(j)).norm_squared() / denom).exp()
        }
    });
    PsdMatrix::new(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_gram(n: usize, r: usize, seed: u64) -> PsdMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, r, |_, _| rng.sample::<f64, _>(StandardNormal));
        PsdMatrix::new(&g * g.transpose()).unwrap()
    }

    fn subset(one_based: &[usize], n: usize) -> Subset {
        Subset::from_one_based(one_based, n).unwrap()
    }

    /// Exhaustive principal-minor sums via LU determinants (independent of Cholesky).
    fn minor_sums_by_enumeration(m: &DMatrix<f64>, up_to: usize) -> Vec<f64> {
        let n = m.nrows();
        let mut out = vec![1.0];
        for j in 1..=up_to {
            out.push(
                (0..n)
                    .combinations(j)
                    .map(|s| DMatrix::from_fn(j, j, |a, b| m[(s[a], s[b])]).determinant())
                    .sum(),
            );
        }
        out
    }

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).amax()
    }

    #[test]
    fn eigendecompose_examples() {
        let e = eigendecompose(&PsdMatrix::identity(3));
        assert_eq!(e.eigenvalues.values(), [1.0, 1.0, 1.0]);
        assert_eq!(e.rank, 3);

        let e = eigendecompose(&PsdMatrix::diagonal(&[4.0, 1.0, 0.0]).unwrap());
        assert_eq!(e.eigenvalues.values(), [4.0, 1.0]);
        assert_eq!(e.rank, 2);
        assert_eq!(
            e.vectors.column(0).map(f64::abs).as_slice(),
            [1.0, 0.0, 0.0]
        );
        assert_eq!(
            e.vectors.column(1).map(f64::abs).as_slice(),
            [0.0, 1.0, 0.0]
        );
        assert_eq!(e.full_spectrum.values(), [4.0, 1.0, 0.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = DMatrix::from_fn(5, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let m = gram_matrix(&x).unwrap();
        let e = eigendecompose(&m);
        assert_eq!(e.rank, 3);
        assert!(max_abs_diff(&e.reconstruct(), m.entries()) < 1e-8 * m.lambda_max());
        let qtq = e.vectors.transpose() * &e.vectors;
        assert!(max_abs_diff(&qtq, &DMatrix::identity(3, 3)) < 1e-10);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            PsdMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]),
            Err(Error::NotSymmetric { row: 1, col: 2 })
        ));
        assert!(matches!(
            PsdMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(
            PsdMatrix::new(DMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            PsdMatrix::diagonal(&[1.0, -1e-3]),
            Err(Error::NotPsd { .. })
        ));
        // tiny negative round-off is tolerated
        assert!(PsdMatrix::diagonal(&[1.0, -1e-13]).is_ok());
        assert!(PsdMatrix::new(DMatrix::zeros(3, 3)).is_ok());
    }

    #[test]
    fn optimal_error_examples() {
        let s = crate::spectra::make_spectrum(&[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(optimal_error(&s, 1).unwrap(), 3.0);
        assert_eq!(optimal_error(&s, 3).unwrap(), 0.0);
        let g = crate::spectra::make_spectrum(&[0.5, 0.25, 0.125, 0.0625]).unwrap();
        assert_eq!(optimal_error(&g, 2).unwrap(), 0.1875);
        assert!(optimal_error(&s, 4).is_err());
    }

    #[test]
    fn invariant_sums_examples() {
        let d = PsdMatrix::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(invariant_sums(&d, 3).unwrap(), [1.0, 6.0, 11.0, 6.0]);
        assert_eq!(
            minor_sums_by_enumeration(d.entries(), 3),
            [1.0, 6.0, 11.0, 6.0]
        );
        assert_eq!(
            invariant_sums(&PsdMatrix::identity(4), 4).unwrap(),
            [1.0, 4.0, 6.0, 4.0, 1.0]
        );
        let m = random_gram(6, 6, 11);
        let by_eig = invariant_sums(&m, 6).unwrap();
        let by_minors = minor_sums_by_enumeration(m.entries(), 6);
        for (a, b) in by_eig.iter().zip(&by_minors) {
            assert!((a - b).abs() <= 1e-9 * b.abs(), "{a} vs {b}");
        }
        assert!(invariant_sums(&m, 7).is_err());
    }

    #[test]
    fn partition_examples() {
        let d = PsdMatrix::diagonal(&[4.0, 2.0, 1.0]).unwrap();
        let p = partition(&d, &subset(&[1], 3)).unwrap();
        assert_eq!(p.a, DMatrix::from_element(1, 1, 4.0));
        assert_eq!(p.b, DMatrix::zeros(2, 1));
        assert_eq!(p.c, DMatrix::from_diagonal(&nalgebra::dvector![2.0, 1.0]));

        let p = partition(&d, &subset(&[1, 2, 3], 3)).unwrap();
        assert_eq!(&p.a, d.entries());
        assert!(p.b.is_empty() && p.c.is_empty());

        let ones = PsdMatrix::new(DMatrix::from_element(3, 3, 1.0)).unwrap();
        let p = partition(&ones, &subset(&[2], 3)).unwrap();
        assert_eq!(p.a, DMatrix::from_element(1, 1, 1.0));
        assert_eq!(p.b, DMatrix::from_element(2, 1, 1.0));
        assert_eq!(p.c, DMatrix::from_element(2, 2, 1.0));
        assert_eq!(p.complement, [0, 2]);

        assert!(matches!(
            Subset::from_one_based(&[4], 3),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            Subset::from_one_based(&[1, 1], 3),
            Err(Error::DuplicateIndex { index: 1 })
        ));
        let far: Subset = "5".parse().unwrap();
        assert!(partition(&d, &far).is_err());
    }

    #[test]
    fn schur_complement_examples() {
        let d = PsdMatrix::diagonal(&[4.0, 2.0, 1.0]).unwrap();
        let s = schur_complement(&partition(&d, &subset(&[1], 3)).unwrap()).unwrap();
        assert_eq!(s, DMatrix::from_diagonal(&nalgebra::dvector![2.0, 1.0]));

        let ones = PsdMatrix::new(DMatrix::from_element(3, 3, 1.0)).unwrap();
        let s = schur_complement(&partition(&ones, &subset(&[1], 3)).unwrap()).unwrap();
        assert_eq!(s, DMatrix::zeros(2, 2));

        let m = random_gram(5, 5, 3);
        let s = schur_complement_of(&m, &subset(&[2, 4], 5)).unwrap();
        let eig = s.clone().symmetric_eigen();
        assert!(eig.eigenvalues.min() >= -1e-10 * m.lambda_max());
        assert!(s.trace() >= 0.0);

        // singular A
        let r1 = PsdMatrix::new(DMatrix::from_element(3, 3, 1.0)).unwrap();
        assert!(matches!(
            schur_complement_of(&r1, &subset(&[1, 2], 3)),
            Err(Error::SingularPivot { .. })
        ));
    }

    #[test]
    fn cur_approximation_examples() {
        let v = nalgebra::dvector![2.0, -1.0, 0.5, 3.0];
        let r1 = PsdMatrix::new(&v * v.transpose()).unwrap();
        let approx = cur_approximation(&r1, &subset(&[1], 4)).unwrap();
        assert!(max_abs_diff(approx.entries(), r1.entries()) < 1e-12 * r1.entries().amax());

        let d = PsdMatrix::diagonal(&[4.0, 2.0, 1.0]).unwrap();
        let approx = cur_approximation(&d, &subset(&[1], 3)).unwrap();
        assert_eq!(
            approx.entries(),
            &DMatrix::from_diagonal(&nalgebra::dvector![4.0, 0.0, 0.0])
        );

        let m = random_gram(5, 5, 5);
        let full = cur_approximation(&m, &subset(&[1, 2, 3, 4, 5], 5)).unwrap();
        assert_eq!(full.entries(), m.entries());
    }

    #[test]
    fn cur_error_examples() {
        let d = PsdMatrix::diagonal(&[4.0, 2.0, 1.0]).unwrap();
        assert_eq!(cur_error_nuclear(&d, &subset(&[1], 3)).unwrap(), 3.0);

        let v = nalgebra::dvector![1.5, 0.5, -2.0];
        let r1 = PsdMatrix::new(&v * v.transpose()).unwrap();
        assert!(cur_error_nuclear(&r1, &subset(&[1], 3)).unwrap().abs() < 1e-12);

        let m = random_gram(6, 6, 9);
        let s = subset(&[2, 5], 6);
        let err = cur_error_nuclear(&m, &s).unwrap();
        let diff = m.entries() - cur_approximation(&m, &s).unwrap().entries();
        let svd_sum: f64 = diff.singular_values().iter().sum();
        assert!((err - svd_sum).abs() < 1e-9 * svd_sum);
    }

    #[test]
    fn nuclear_norm_examples() {
        assert_eq!(nuclear_norm(&PsdMatrix::identity(3)), 3.0);
        let d = PsdMatrix::diagonal(&[1.0, 0.25, 1.0 / 9.0]).unwrap();
        assert_eq!(nuclear_norm(&d), 1.0 + 0.25 + 1.0 / 9.0);
        assert_eq!(
            nuclear_norm(&PsdMatrix::new(DMatrix::zeros(4, 4)).unwrap()),
            0.0
        );
        let m = random_gram(7, 4, 1);
        let eig_sum: f64 = m.spectrum().values().iter().sum();
        assert!((nuclear_norm(&m) - eig_sum).abs() < 1e-10 * eig_sum);
    }

    #[test]
    fn parse_and_kernels() {
        let m = parse_matrix("2, 1\n1 2\n").unwrap();
        assert_eq!(
            m.entries(),
            &DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0])
        );
        assert!(matches!(
            parse_matrix("1 2\n3 4"),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(parse_matrix("1 2\n3"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix("1 a\n"), Err(Error::Parse(_))));

        let x = parse_dense("1 0\n0 2\n1 1").unwrap();
        let g = gram_matrix(&x).unwrap();
        assert_eq!(
            g.entries(),
            &DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 5.0])
        );
        let k = rbf_kernel(&x, 1.0).unwrap();
        assert_eq!(k.n(), 3);
        assert!((k.get(0, 1) - (-5.0f64 / 2.0).exp()).abs() < 1e-15);
        assert!(rbf_kernel(&x, 0.0).is_err());
    }

    #[test]
    fn subset_text_form_is_one_based() {
        let s: Subset = "3, 1".parse().unwrap();
        assert_eq!(s.indices(), [0, 2]);
        assert_eq!(s.to_string(), "1,3");
        assert!("0,1".parse::<Subset>().is_err());
        assert!("a".parse::<Subset>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn interpolates_selected_rows_and_has_rank_k(seed in any::<u64>(), n in 3usize..8, k in 1usize..3) {
            let m = random_gram(n, n, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let mut idx: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = rng.random_range(i..n);
                idx.swap(i, j);
            }
            let s = Subset::new(idx[..k].to_vec(), n).unwrap();
            let approx = cur_approximation(&m, &s).unwrap();
            let scale = m.entries().amax();
            for &i in s.indices() {
                for j in 0..n {
                    prop_assert!((approx.get(i, j) - m.get(i, j)).abs() <= 1e-12 * scale);
                    prop_assert!((approx.get(j, i) - m.get(j, i)).abs() <= 1e-12 * scale);
                }
            }
            prop_assert_eq!(approx.rank(), k);
            let schur = schur_complement_of(&m, &s).unwrap();
            let min = schur.symmetric_eigen().eigenvalues.min();
            prop_assert!(min >= -1e-10 * m.lambda_max());
        }

        #[test]
        fn invariant_sums_match_minor_enumeration(seed in any::<u64>(), n in 1usize..=8, r in 1usize..=8) {
            let m = random_gram(n, r.min(n), seed);
            let a = invariant_sums(&m, n).unwrap();
            let b = minor_sums_by_enumeration(m.entries(), n);
            let scale = m.lambda_max().max(1.0);
            for j in 0..=n {
                // sums that vanish exactly come out as rounding noise of size ε·C(n, j)·λ_1^j
                let floor = 1e-12 * crate::sampling::binomial(n, j) as f64 * scale.powi(j as i32);
                prop_assert!((a[j] - b[j]).abs() <= 1e-9 * b[j].abs() + floor, "j = {}: {} vs {}", j, a[j], b[j]);
            }
        }

        #[test]
        fn bordered_determinant_vanishes_with_singular_block(seed in any::<u64>(), k in 2usize..7) {
            // first k rows of H span a (k-1)-dimensional space, so A = H_k H_kᵀ is singular
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = k + 2;
            let basis = DMatrix::from_fn(k - 1, d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let coef = DMatrix::from_fn(k, k - 1, |_, _| rng.sample::<f64, _>(StandardNormal));
            let mut h = DMatrix::zeros(k + 1, d);
            h.view_mut((0, 0), (k, d)).copy_from(&(coef * basis));
            for j in 0..d {
                h[(k, j)] = rng.sample::<f64, _>(StandardNormal);
            }
            let full = &h * h.transpose();
            let scale = full.amax();
            prop_assert!(full.view((0, 0), (k, k)).determinant().abs() < 1e-10 * scale.powi(k as i32));
            prop_assert!(full.determinant().abs() < 1e-10 * scale.powi(k as i32 + 1));
        }
    }
}
