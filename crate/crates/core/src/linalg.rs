//! Small dense linear-algebra helpers used across the pipeline.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest absolute entry, 0 for an empty matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Largest absolute entrywise difference; errors on shape mismatch.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(alloc::format!(
            "cannot compare {}x{} with {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok((a - b).iter().fold(0.0, |acc: f64, v| acc.max(v.abs())))
}

/// Spectral radius of a square matrix (largest eigenvalue modulus).
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.complex_eigenvalues()
        .iter()
        .fold(0.0, |acc: f64, ev| acc.max(ev.norm_sqr()))
        .sqrt()
}

/// Numerical rank with the relative singular-value threshold
/// `max(rows, cols) * sigma_max * rel`, plus the smallest singular value.
pub fn numerical_rank(m: &DMatrix<f64>, rel: f64) -> (usize, f64) {
    if m.is_empty() {
        return (0, 0.0);
    }
    let sv = m.clone().singular_values();
    let sigma_max = sv.max();
    let thresh = m.nrows().max(m.ncols()) as f64 * sigma_max * rel;
    let rank = sv.iter().filter(|&&s| s > thresh).count();
    (rank, sv.min())
}

/// True when `m` is square and symmetric within `tol`.
pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.symmetric_eigenvalues().min()
}

/// Column-stacked vectorization.
pub fn vectorize(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &DVector<f64>, nrows: usize, ncols: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(nrows, ncols, v.as_slice())
}

/// True when every entry is finite.
pub fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}
