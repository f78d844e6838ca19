//! Werner states on ℂᵈ⊗ℂᵈ and the partial-transpose (NPT) test.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::spectrum::hermitian_eigenvalues;

/// Eigenvalues below this count as negative.
pub const NPT_TOL: f64 = 1e-12;

/// `(I + α·SWAP) / (d² + α d)` on ℂᵈ⊗ℂᵈ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WernerState {
    pub d: usize,
    pub alpha: f64,
    pub rho: ComplexMatrix,
}

pub fn werner(d: usize, alpha: f64) -> Result<WernerState> {
    if d < 2 {
        return Err(Error::Dimension {
            d,
            reason: "Werner states require d >= 2",
        });
    }
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::Parameter(format!("alpha = {alpha} outside [-1, 1]")));
    }
    let n = d * d;
    let norm = (n as f64 + alpha * d as f64).recip();
    // SWAP sends |i⟩|j⟩ to |j⟩|i⟩: row i·d + j, column j·d + i.
    let rho = ComplexMatrix::from_fn(n, n, |r, c| {
        let mut v = if r == c { 1.0 } else { 0.0 };
        if c == (r % d) * d + r / d {
            v += alpha;
        }
        Complex64::new(v * norm, 0.0)
    });
    Ok(WernerState { d, alpha, rho })
}

/// Transposes the first tensor factor: the `d_b × d_b` block at `(i, j)` moves
/// to `(j, i)`.
pub fn partial_transpose(rho: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
    let n = d_a * d_b;
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::Shape {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / d_b, r % d_b);
        let (j, l) = (c / d_b, c % d_b);
        rho[(j * d_b + k, i * d_b + l)]
    }))
}

/// Sorted (descending) eigenvalues of the partial transpose of `state`.
pub fn pt_spectrum(state: &WernerState) -> Result<Vec<f64>> {
    hermitian_eigenvalues(&partial_transpose(&state.rho, state.d, state.d)?)
}

pub fn min_pt_eigenvalue(state: &WernerState) -> Result<f64> {
    Ok(pt_spectrum(state)?.last().copied().unwrap_or(0.0))
}

pub fn is_npt(state: &WernerState) -> Result<bool> {
    Ok(min_pt_eigenvalue(state)? < -NPT_TOL)
}

/// Partial-transpose spectrum in closed form: `(1 + α d)/(d² + α d)` once and
/// `1/(d² + α d)` with multiplicity `d² - 1`, sorted descending.
pub fn werner_pt_eigenvalues(d: usize, alpha: f64) -> Vec<f64> {
    let df = d as f64;
    let denom = df * df + alpha * df;
    let mut v = vec![1.0 / denom; d * d - 1];
    v.push((1.0 + alpha * df) / denom);
    crate::spectrum::sort_descending(&mut v);
    v
}

/// Bisects `α ∈ [-1, 0]` for the largest value at which `werner(d, α)` is NPT.
pub fn npt_threshold(d: usize, iters: usize) -> Result<f64> {
    let (mut lo, mut hi) = (-1.0, 0.0);
    if !is_npt(&werner(d, lo)?)? {
        return Err(Error::Parameter(format!("werner({d}, -1) is not NPT")));
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if is_npt(&werner(d, mid)?)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
