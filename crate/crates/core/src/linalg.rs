//! Dense symmetric linear algebra helpers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Eigenvalues below this fraction of the largest magnitude count as zero.
pub const ZERO_EIGEN_RELATIVE: f64 = 1e-10;

/// Absolute zero threshold for a spectrum: `1e-10 · max |λ|`.
pub fn zero_cutoff(eigenvalues: &[f64]) -> f64 {
    let top = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    ZERO_EIGEN_RELATIVE * top
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn symmetric_eigen(m: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new(m.clone())
}

/// Exact spectral norm of a symmetric matrix (largest |λ|).
pub fn symmetric_norm(m: &DMatrix<f64>) -> f64 {
    sorted_eigenvalues(m).iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest absolute eigenvalue of a symmetric matrix by power iteration.
///
/// The estimate is `s = ‖A x‖` for the current unit iterate `x`, which tends to
/// `max |λ|` even when `λ` and `−λ` are both extreme. Iteration stops once `x`
/// is an approximate eigenvector of `A²`: `‖A²x − s²x‖ ≤ rel_tol · s²`.
pub fn power_iteration_norm<R: Rng + ?Sized>(
    a: &DMatrix<f64>,
    rel_tol: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = a.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    let mut x = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let norm = x.norm();
    x /= norm;
    let mut y = a * &x;
    let mut w = DVector::zeros(n);
    let mut estimate = y.norm();
    for _ in 0..max_iter {
        estimate = y.norm();
        if estimate == 0.0 {
            // x is in the kernel; for a random start this means A = 0 up to rounding.
            return Ok(0.0);
        }
        a.mul_to(&y, &mut w);
        let s2 = estimate * estimate;
        let residual = (&w - &x * s2).norm();
        if residual <= rel_tol * s2 {
            return Ok(estimate);
        }
        x.copy_from(&y);
        x /= estimate;
        std::mem::swap(&mut y, &mut w);
        y /= estimate;
    }
    Err(Error::NotConverged {
        estimate,
        iterations: max_iter,
    })
}

/// Power iteration estimate, falling back to the best estimate on non-convergence.
pub fn power_iteration_estimate<R: Rng + ?Sized>(a: &DMatrix<f64>, rng: &mut R) -> f64 {
    let n = a.nrows();
    match power_iteration_norm(a, 1e-9, 10 * n + 1000, rng) {
        Ok(v) => v,
        Err(Error::NotConverged { estimate, .. }) => estimate,
        Err(_) => f64::NAN,
    }
}
