//! Squared singular values of `X`, the top-two objective, and the split
//! `X^H X = H1 + H2`.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{build_x, kron, ComplexMatrix, ConstrainedPair};

/// Hermiticity tolerance for eigen-kernels.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues of a Gram matrix above `-CLAMP_TOL` are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

/// Descending squared singular values of `X` and the top-two objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    #[serde(rename = "sigma_sq")]
    pub singular_values_sq: Vec<f64>,
    pub objective: f64,
    pub trace_check: f64,
}

impl SpectrumReport {
    fn from_gram_eigenvalues(eigs: Vec<f64>) -> Result<Self> {
        let mut sq = Vec::with_capacity(eigs.len());
        for v in eigs {
            if v < -CLAMP_TOL {
                return Err(Error::NegativeEigenvalue { value: v });
            }
            sq.push(v.max(0.0));
        }
        let objective = sq.iter().take(2).sum();
        let trace_check = sq.iter().sum();
        Ok(Self {
            singular_values_sq: sq,
            objective,
            trace_check,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.singular_values_sq[0]
    }
}

/// Sorts descending; equal values keep their original order.
pub(crate) fn sort_descending(values: &mut [f64]) {
    values.sort_by(|a, b| b.total_cmp(a));
}

/// All eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.ensure_hermitian(HERMITIAN_TOL)?;
    let eig = SymmetricEigen::try_new(m.to_nalgebra(), f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence);
    }
    sort_descending(&mut values);
    Ok(values)
}

/// Eigenvalues of a general square matrix from its complex Schur form, in
/// diagonal order of the triangular factor.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    m.ensure_square()?;
    let schur = nalgebra::linalg::Schur::try_new(m.to_nalgebra(), f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Spectrum report for an arbitrary square `X` via the eigenvalues of `X^H X`.
pub fn spectrum_of(x: &ComplexMatrix) -> Result<SpectrumReport> {
    x.ensure_square()?;
    SpectrumReport::from_gram_eigenvalues(hermitian_eigenvalues(&x.gram())?)
}

/// Squared singular values of `X` from an SVD, descending. Used as an
/// independent cross-check of [`spectrum_of`].
pub fn singular_values_sq_svd(x: &ComplexMatrix) -> Result<Vec<f64>> {
    let svd =
        nalgebra::linalg::SVD::try_new(x.to_nalgebra(), false, false, f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let mut sq: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    sort_descending(&mut sq);
    Ok(sq)
}

/// `σ1² + σ2²` of `X = A ⊗ I + I ⊗ B` for a feasible pair.
///
/// The factor order is canonicalized before building `X`, so a pair and its
/// swapped counterpart produce bit-identical reports.
pub fn objective(pair: &ConstrainedPair) -> Result<SpectrumReport> {
    let x = if pair.a().total_cmp(pair.b()).is_gt() {
        let swapped = ConstrainedPair::new_unchecked(pair.b().clone(), pair.a().clone())?;
        pair.check()?;
        build_x(&swapped)?
    } else {
        build_x(pair)?
    };
    spectrum_of(&x)
}

/// `λ1(M) + λ2(M)` for Hermitian `M` of order at least 2.
pub fn top_two_sum(m: &ComplexMatrix) -> Result<f64> {
    let n = m.ensure_square()?;
    if n < 2 {
        return Err(Error::Dimension {
            d: n,
            reason: "top-two sum needs order >= 2",
        });
    }
    let eigs = hermitian_eigenvalues(m)?;
    Ok(eigs[0] + eigs[1])
}

/// `H1 = A^H A ⊗ I + I ⊗ B^H B`, `H2 = A^H ⊗ B + A ⊗ B^H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HSplit {
    pub h1: ComplexMatrix,
    pub h2: ComplexMatrix,
}

pub fn h_split(pair: &ConstrainedPair) -> HSplit {
    let (a, b) = (pair.a(), pair.b());
    let id = ComplexMatrix::identity(pair.d());
    let h1 = &kron(&a.gram(), &id) + &kron(&id, &b.gram());
    let cross = kron(&a.adjoint(), b);
    // A ⊗ B^H is the adjoint of A^H ⊗ B.
    let h2 = &cross + &cross.adjoint();
    HSplit { h1, h2 }
}
