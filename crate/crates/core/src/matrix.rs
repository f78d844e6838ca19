//! Dense complex matrices, Kronecker products, and the constraint algebra
//! for pairs `(A, B)` that define the Kronecker sum `X = A ⊗ I + I ⊗ B`.
//!
//! The pair constraints are `tr A = tr B = 0` and
//! `tr(A^H A) + tr(B^H B) = 1/d`. Pairs built through [`ConstrainedPair::new`]
//! are checked against them; [`ConstrainedPair::new_unchecked`] only checks
//! shapes and exists for exploratory use.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Acceptance tolerance for `|tr A|` and `|tr B|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Acceptance tolerance for `|tr(A^H A) + tr(B^H B) - 1/d|`.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on `||U^H U - I||_F` for local unitaries.
pub const UNITARY_TOL: f64 = 1e-10;

/// Row-major dense complex matrix with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let data = repr.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::new(repr.rows, repr.cols, data)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape {
                expected: "positive dimensions".into(),
                got: format!("{rows}x{cols}"),
            });
        }
        if data.len() != rows * cols {
            return Err(Error::Shape {
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let diag: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&diag)
    }

    /// Builds a matrix entrywise. Panics if `f` produces a non-finite entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data).expect("from_fn produced an invalid matrix")
    }

    /// Real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    /// Unit matrix `E_ij` (zero-based indices).
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    /// `tr(M^H M)`, the squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `M - M^H`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<usize> {
        let n = self.ensure_square()?;
        let deviation = self.hermitian_deviation();
        if deviation <= tol {
            Ok(n)
        } else {
            Err(Error::NotHermitian { deviation })
        }
    }

    /// `||M^H M - I||_F`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint().matmul(self) - &Self::identity(self.rows)).frobenius_norm()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].norm() <= tol))
    }

    /// Matrix product. Panics on inner-dimension mismatch.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `M^H M`, Hermitian by construction.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.rows {
                    acc += self[(k, i)].conj() * self[(k, j)];
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Result<Self> {
        let data = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)])
            .collect();
        Self::new(m.nrows(), m.ncols(), data)
    }

    /// Lexicographic order on `(rows, cols, re, im, ...)` using total float ordering.
    pub(crate) fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.rows, self.cols).cmp(&(other.rows, other.cols)).then_with(|| {
            for (a, b) in self.data.iter().zip(&other.data) {
                let o = a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
                if o.is_ne() {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product: entry `(i·rB + p, j·cB + q)` is `A(i,j)·B(p,q)`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(a.rows * rb, a.cols * cb);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for p in 0..rb {
                for q in 0..cb {
                    out[(i * rb + p, j * cb + q)] = aij * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Kronecker sum `A ⊗ I_m + I_n ⊗ B` for square `A` (n×n) and `B` (m×m).
pub fn kron_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    let m = b.ensure_square()?;
    Ok(&kron(a, &ComplexMatrix::identity(m)) + &kron(&ComplexMatrix::identity(n), b))
}

/// Absolute constraint residuals of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub trace_a: f64,
    pub trace_b: f64,
    pub norm: f64,
}

impl Residuals {
    pub fn within(&self, trace_tol: f64, norm_tol: f64) -> bool {
        self.trace_a <= trace_tol && self.trace_b <= trace_tol && self.norm <= norm_tol
    }

    pub fn max(&self) -> f64 {
        self.trace_a.max(self.trace_b).max(self.norm)
    }
}

/// A pair of `d×d` matrices with `d ≥ 3`, normally satisfying the trace and
/// norm constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairRepr", into = "PairRepr")]
pub struct ConstrainedPair {
    d: usize,
    a: ComplexMatrix,
    b: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct PairRepr {
    d: usize,
    #[serde(rename = "A")]
    a: ComplexMatrix,
    #[serde(rename = "B")]
    b: ComplexMatrix,
}

impl TryFrom<PairRepr> for ConstrainedPair {
    type Error = Error;

    fn try_from(repr: PairRepr) -> Result<Self> {
        let pair = ConstrainedPair::new_unchecked(repr.a, repr.b)?;
        if pair.d != repr.d {
            return Err(Error::Shape {
                expected: format!("d = {}", repr.d),
                got: format!("{}x{} matrices", pair.d, pair.d),
            });
        }
        Ok(pair)
    }
}

impl From<ConstrainedPair> for PairRepr {
    fn from(p: ConstrainedPair) -> Self {
        PairRepr { d: p.d, a: p.a, b: p.b }
    }
}

fn pair_dimension(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<usize> {
    let d = a.ensure_square()?;
    let db = b.ensure_square()?;
    if d != db {
        return Err(Error::Shape {
            expected: format!("B of size {d}x{d}"),
            got: format!("{db}x{db}"),
        });
    }
    if d < 3 {
        return Err(Error::Dimension {
            d,
            reason: "pairs require d >= 3",
        });
    }
    Ok(d)
}

impl ConstrainedPair {
    /// Checked constructor: fails unless both constraints hold within
    /// [`TRACE_TOL`] and [`NORM_TOL`].
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        let pair = Self::new_unchecked(a, b)?;
        pair.check()?;
        Ok(pair)
    }

    /// Shape-checked only; the constraints are not enforced.
    pub fn new_unchecked(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        let d = pair_dimension(&a, &b)?;
        Ok(Self { d, a, b })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn into_parts(self) -> (ComplexMatrix, ComplexMatrix) {
        (self.a, self.b)
    }

    pub fn residuals(&self) -> Residuals {
        Residuals {
            trace_a: self.a.trace().norm(),
            trace_b: self.b.trace().norm(),
            norm: (self.a.frobenius_sq() + self.b.frobenius_sq() - 1.0 / self.d as f64).abs(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.residuals().within(TRACE_TOL, NORM_TOL)
    }

    pub fn check(&self) -> Result<()> {
        let r = self.residuals();
        if r.within(TRACE_TOL, NORM_TOL) {
            Ok(())
        } else {
            Err(Error::Constraint {
                trace_a: r.trace_a,
                trace_b: r.trace_b,
                norm: r.norm,
            })
        }
    }
}

/// `X = A ⊗ I_d + I_d ⊗ B` for a feasible pair.
pub fn build_x(pair: &ConstrainedPair) -> Result<ComplexMatrix> {
    pair.check()?;
    Ok(build_x_unchecked(pair))
}

/// `X = A ⊗ I_d + I_d ⊗ B` without the feasibility check.
pub fn build_x_unchecked(pair: &ConstrainedPair) -> ComplexMatrix {
    let d = pair.d;
    let mut x = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for k in 0..d {
            let aik = pair.a[(i, k)];
            if aik != Complex64::new(0.0, 0.0) {
                for j in 0..d {
                    x[(i * d + j, k * d + j)] += aik;
                }
            }
        }
        for j in 0..d {
            for l in 0..d {
                x[(i * d + j, i * d + l)] += pair.b[(j, l)];
            }
        }
    }
    x
}

/// The equivalence transformations that leave the top-two objective unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SymmetryOp {
    Transpose,
    Conjugate,
    Adjoint,
    /// `(A, B) -> (U A U^H, V B V^H)`.
    LocalUnitary {
        u: ComplexMatrix,
        v: ComplexMatrix,
    },
    /// `(A, B) -> (B, A)`, so the new `X` is `I ⊗ A + B ⊗ I`.
    SwapFactors,
}

pub fn apply_symmetry(pair: &ConstrainedPair, op: &SymmetryOp) -> Result<ConstrainedPair> {
    let (a, b) = match op {
        SymmetryOp::Transpose => (pair.a.transpose(), pair.b.transpose()),
        SymmetryOp::Conjugate => (pair.a.conj(), pair.b.conj()),
        SymmetryOp::Adjoint => (pair.a.adjoint(), pair.b.adjoint()),
        SymmetryOp::LocalUnitary { u, v } => {
            for w in [u, v] {
                if w.rows() != pair.d || w.cols() != pair.d {
                    return Err(Error::Shape {
                        expected: format!("{0}x{0} unitary", pair.d),
                        got: format!("{}x{}", w.rows(), w.cols()),
                    });
                }
                let deviation = w.unitarity_deviation();
                if deviation > UNITARY_TOL {
                    return Err(Error::NotUnitary { deviation });
                }
            }
            (
                u.matmul(&pair.a).matmul(&u.adjoint()),
                v.matmul(&pair.b).matmul(&v.adjoint()),
            )
        }
        SymmetryOp::SwapFactors => (pair.b.clone(), pair.a.clone()),
    };
    Ok(ConstrainedPair { d: pair.d, a, b })
}

/// Removes the traces of `A` and `B` and rescales both by one positive factor
/// so that `tr(A^H A) + tr(B^H B) = 1/d`.
pub fn project_to_constraints(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ConstrainedPair> {
    let d = pair_dimension(a, b)?;
    let remove_trace = |m: &ComplexMatrix| {
        let shift = m.trace() / d as f64;
        let mut out = m.clone();
        for i in 0..d {
            out[(i, i)] -= shift;
        }
        out
    };
    let a0 = remove_trace(a);
    let b0 = remove_trace(b);
    let norm = a0.frobenius_sq() + b0.frobenius_sq();
    let scale_ref = a.frobenius_sq() + b.frobenius_sq();
    if norm == 0.0 || norm <= 1e-28 * scale_ref {
        return Err(Error::Degenerate);
    }
    let s = (1.0 / (d as f64 * norm)).sqrt();
    Ok(ConstrainedPair {
        d,
        a: a0.scale(s),
        b: b0.scale(s),
    })
}

/// Unitarily reduces both factors to upper-triangular (complex Schur) form.
/// Returns the reduced pair together with the unitaries `U`, `V` such that the
/// reduced pair is `apply_symmetry(pair, LocalUnitary { u: U, v: V })`.
pub fn schur_form(pair: &ConstrainedPair) -> Result<(ConstrainedPair, ComplexMatrix, ComplexMatrix)> {
    let unitary = |m: &ComplexMatrix| -> Result<ComplexMatrix> {
        let schur = nalgebra::linalg::Schur::try_new(m.to_nalgebra(), f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
        let (q, _t) = schur.unpack();
        Ok(ComplexMatrix::from_nalgebra(&q)?.adjoint())
    };
    let u = unitary(&pair.a)?;
    let v = unitary(&pair.b)?;
    let reduced = apply_symmetry(
        pair,
        &SymmetryOp::LocalUnitary {
            u: u.clone(),
            v: v.clone(),
        },
    )?;
    Ok((reduced, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn saturating_d4() -> ConstrainedPair {
        let a = ComplexMatrix::from_real_diag(&[0.25, -0.25, 0.0, 0.0]);
        ConstrainedPair::new(a.clone(), a).unwrap()
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let z = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        assert_eq!(kron(&z, &i2), ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kron_of_unit_matrices() {
        // E12 ⊗ E21: row (0·2+1), col (1·2+0) zero-based, i.e. (2, 3) one-based.
        let k = kron(&ComplexMatrix::unit(2, 2, 0, 1), &ComplexMatrix::unit(2, 2, 1, 0));
        assert_eq!(k, ComplexMatrix::unit(4, 4, 1, 2));
    }

    #[test]
    fn kron_shapes_for_rectangular_factors() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| c((i + j) as f64, 1.0));
        let b = ComplexMatrix::from_fn(3, 1, |i, _| c(i as f64, -1.0));
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (6, 3));
        assert_eq!(k[(3 + 2, 2)], a[(1, 2)] * b[(2, 0)]);
    }

    #[test]
    fn new_rejects_bad_inputs() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]),
            Err(Error::Shape { .. })
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![c(0.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn build_x_with_zero_b_repeats_diagonal() {
        let a = ComplexMatrix::from_real_diag(&[0.25, -0.25, 0.0, 0.0]);
        let b = ComplexMatrix::zeros(4, 4);
        let scale = (1.0_f64 / (4.0 * a.frobenius_sq())).sqrt();
        let pair = ConstrainedPair::new(a.scale(scale), b).unwrap();
        let x = build_x(&pair).unwrap();
        let s = 0.25 * scale;
        let mut expected = Vec::new();
        for v in [s, -s, 0.0, 0.0] {
            expected.extend([v; 4]);
        }
        assert!(x.max_abs_diff(&ComplexMatrix::from_real_diag(&expected)) < 1e-15);
    }

    #[test]
    fn build_x_diagonal_sums() {
        let pair = saturating_d4();
        let x = build_x(&pair).unwrap();
        let v = [0.25, -0.25, 0.0, 0.0];
        assert!(x.is_diagonal());
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(x[(i * 4 + j, i * 4 + j)], c(v[i] + v[j], 0.0));
            }
        }
        assert_eq!(x, kron_sum(pair.a(), pair.b()).unwrap());
    }

    #[test]
    fn build_x_rejects_infeasible() {
        let pair = ConstrainedPair::new_unchecked(ComplexMatrix::identity(3), ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(matches!(build_x(&pair), Err(Error::Constraint { .. })));
        assert_eq!(build_x_unchecked(&pair), kron_sum(pair.a(), pair.b()).unwrap());
        assert!(matches!(
            ConstrainedPair::new(ComplexMatrix::identity(3), ComplexMatrix::zeros(3, 3)),
            Err(Error::Constraint { .. })
        ));
    }

    #[test]
    fn pair_rejects_small_or_mismatched() {
        assert!(matches!(
            ConstrainedPair::new_unchecked(ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(2, 2)),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            ConstrainedPair::new_unchecked(ComplexMatrix::zeros(3, 3), ComplexMatrix::zeros(4, 4)),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn swap_is_involution_and_identity_unitary_is_noop() {
        let pair = saturating_d4();
        let once = apply_symmetry(&pair, &SymmetryOp::SwapFactors).unwrap();
        assert_eq!(apply_symmetry(&once, &SymmetryOp::SwapFactors).unwrap(), pair);
        let id = ComplexMatrix::identity(4);
        let same = apply_symmetry(&pair, &SymmetryOp::LocalUnitary { u: id.clone(), v: id }).unwrap();
        assert_eq!(same, pair);
    }

    #[test]
    fn adjoint_of_upper_triangular_is_lower_triangular() {
        let mut a = ComplexMatrix::zeros(4, 4);
        a[(0, 1)] = c(0.1, 0.2);
        a[(2, 3)] = c(-0.3, 0.05);
        let b = ComplexMatrix::zeros(4, 4);
        let pair = project_to_constraints(&a, &b).unwrap();
        let adj = apply_symmetry(&pair, &SymmetryOp::Adjoint).unwrap();
        assert!(adj.a().transpose().is_upper_triangular(0.0));
        assert_eq!(adj.a()[(1, 0)], pair.a()[(0, 1)].conj());
    }

    #[test]
    fn non_unitary_rejected() {
        let pair = saturating_d4();
        let u = ComplexMatrix::identity(4).scale(2.0);
        assert!(matches!(
            apply_symmetry(
                &pair,
                &SymmetryOp::LocalUnitary {
                    u: u.clone(),
                    v: ComplexMatrix::identity(4)
                }
            ),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn projection_of_scalar_matrices_is_degenerate() {
        let i4 = ComplexMatrix::identity(4);
        assert_eq!(project_to_constraints(&i4, &i4), Err(Error::Degenerate));
    }

    #[test]
    fn projection_closed_form() {
        let a = ComplexMatrix::from_real_diag(&[2.0, -2.0, 0.0, 0.0]);
        let pair = project_to_constraints(&a, &ComplexMatrix::zeros(4, 4)).unwrap();
        // 2 s^2 = 1/4
        let s = (1.0_f64 / 8.0).sqrt();
        let expected = ComplexMatrix::from_real_diag(&[s, -s, 0.0, 0.0]);
        assert!(pair.a().max_abs_diff(&expected) < 1e-15);
        assert!(pair.is_feasible());
    }

    #[test]
    fn projection_fixes_feasible_pairs() {
        let pair = saturating_d4();
        let again = project_to_constraints(pair.a(), pair.b()).unwrap();
        assert!(again.a().max_abs_diff(pair.a()) < 1e-15);
        assert!(again.b().max_abs_diff(pair.b()) < 1e-15);
    }

    #[test]
    fn schur_form_is_upper_triangular() {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| {
            c((i * 4 + j) as f64 * 0.1 - 0.7, (i as f64 - j as f64) * 0.05)
        });
        let b = ComplexMatrix::from_fn(4, 4, |i, j| c(((i + 2 * j) % 3) as f64, 0.3 * (i * j) as f64));
        let pair = project_to_constraints(&a, &b).unwrap();
        let (reduced, u, v) = schur_form(&pair).unwrap();
        assert!(reduced.a().is_upper_triangular(1e-12));
        assert!(reduced.b().is_upper_triangular(1e-12));
        assert!(u.unitarity_deviation() < 1e-12 && v.unitarity_deviation() < 1e-12);
        assert!(reduced.residuals().max() < 1e-12);
    }

    #[test]
    fn json_formats() {
        let m = ComplexMatrix::new(1, 2, vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"entries":[[1.0,-2.0],[0.5,0.0]]}"#);
        assert_eq!(serde_json::from_str::<ComplexMatrix>(&s).unwrap(), m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#).is_err());

        let pair = saturating_d4();
        let v = serde_json::to_value(&pair).unwrap();
        assert_eq!(v["d"], 4);
        assert!(v.get("A").is_some() && v.get("B").is_some());
        let back: ConstrainedPair = serde_json::from_value(v).unwrap();
        assert_eq!(back, pair);
    }

    #[test]
    fn symmetry_op_json_tags() {
        let v = serde_json::to_value(SymmetryOp::SwapFactors).unwrap();
        assert_eq!(v["kind"], "swap-factors");
    }
}
