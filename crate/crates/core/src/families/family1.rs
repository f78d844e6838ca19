//! d = 4 family: `A` has the anti-diagonal 2×2 block pattern
//!
//! ```text
//! [ 0  a1 0  0  ]
//! [ a2 0  0  0  ]
//! [ 0  0  0  a3 ]
//! [ 0  0  a4 0  ]
//! ```
//!
//! and `B` either has the same pattern or is `diag(b1..b4)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::psd_block_eigs;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ConstrainedPair, NORM_TOL, TRACE_TOL};
use crate::sampling::complex_gaussian_vec;
use crate::spectrum::sort_descending;

const D: usize = 4;
/// Nonzero positions of the anti-diagonal block pattern, zero-based.
const PATTERN: [(usize, usize); 4] = [(0, 1), (1, 0), (2, 3), (3, 2)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family1Repr", into = "Family1Repr")]
pub struct Family1Spec {
    a: [Complex64; 4],
    b: [Complex64; 4],
    b_is_diagonal: bool,
}

#[derive(Serialize, Deserialize)]
struct Family1Repr {
    a: [Complex64; 4],
    b: [Complex64; 4],
    b_is_diagonal: bool,
}

impl TryFrom<Family1Repr> for Family1Spec {
    type Error = Error;

    fn try_from(r: Family1Repr) -> Result<Self> {
        Family1Spec::new(r.a, r.b, r.b_is_diagonal)
    }
}

impl From<Family1Spec> for Family1Repr {
    fn from(s: Family1Spec) -> Self {
        Family1Repr {
            a: s.a,
            b: s.b,
            b_is_diagonal: s.b_is_diagonal,
        }
    }
}

impl Family1Spec {
    pub fn new(a: [Complex64; 4], b: [Complex64; 4], b_is_diagonal: bool) -> Result<Self> {
        let norm = (a.iter().chain(&b).map(|z| z.norm_sqr()).sum::<f64>() - 0.25).abs();
        let trace_b = if b_is_diagonal {
            b.iter().sum::<Complex64>().norm()
        } else {
            0.0
        };
        if norm > NORM_TOL || trace_b > TRACE_TOL {
            return Err(Error::Constraint {
                trace_a: 0.0,
                trace_b,
                norm,
            });
        }
        Ok(Self { a, b, b_is_diagonal })
    }

    /// Rescales (and, for diagonal `B`, centers `b`) onto the constraint set.
    pub fn project(a: [Complex64; 4], mut b: [Complex64; 4], b_is_diagonal: bool) -> Result<Self> {
        if b_is_diagonal {
            let mean = b.iter().sum::<Complex64>() / 4.0;
            b.iter_mut().for_each(|z| *z -= mean);
        }
        let norm: f64 = a.iter().chain(&b).map(|z| z.norm_sqr()).sum();
        if norm == 0.0 {
            return Err(Error::Degenerate);
        }
        let s = (0.25 / norm).sqrt();
        Self::new(a.map(|z| z * s), b.map(|z| z * s), b_is_diagonal)
    }

    pub fn a(&self) -> &[Complex64; 4] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64; 4] {
        &self.b
    }

    pub fn b_is_diagonal(&self) -> bool {
        self.b_is_diagonal
    }
}

fn anti_diagonal_blocks(v: &[Complex64; 4]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(D, D);
    for (&(i, j), &z) in PATTERN.iter().zip(v) {
        m[(i, j)] = z;
    }
    m
}

pub fn family1_matrices(spec: &Family1Spec) -> Result<ConstrainedPair> {
    let a = anti_diagonal_blocks(&spec.a);
    let b = if spec.b_is_diagonal {
        ComplexMatrix::from_diag(&spec.b)
    } else {
        anti_diagonal_blocks(&spec.b)
    };
    ConstrainedPair::new(a, b)
}

/// The 16 eigenvalues of `X^H X` for anti-diagonal `B`, descending, as the
/// roots of eight quadratics `(λ - p)(λ - q) - c`: four built from `(a1, a2)`
/// and four from `(a3, a4)`.
pub fn family1_eigs_closed_form(spec: &Family1Spec) -> Result<Vec<f64>> {
    if spec.b_is_diagonal {
        return Err(Error::Parameter(
            "closed-form quadratics need anti-diagonal B; use family1_blocks for diagonal B".into(),
        ));
    }
    let [b1, b2, b3, b4] = spec.b;
    let mut eigs = Vec::with_capacity(16);
    for (x1, x2) in [(spec.a[0], spec.a[1]), (spec.a[2], spec.a[3])] {
        let (m1, m2) = (x1.norm_sqr(), x2.norm_sqr());
        let lines = [
            (
                m1 + b2.norm_sqr(),
                m2 + b1.norm_sqr(),
                (x1 * b1.conj() + x2.conj() * b2).norm_sqr(),
            ),
            (
                m1 + b1.norm_sqr(),
                m2 + b2.norm_sqr(),
                (x1 * b2.conj() + x2.conj() * b1).norm_sqr(),
            ),
            (
                m1 + b4.norm_sqr(),
                m2 + b3.norm_sqr(),
                (x1 * b3.conj() + x2.conj() * b4).norm_sqr(),
            ),
            (
                m1 + b3.norm_sqr(),
                m2 + b4.norm_sqr(),
                (x1 * b4.conj() + x2.conj() * b3).norm_sqr(),
            ),
        ];
        for (p, q, c) in lines {
            let (hi, lo) = psd_block_eigs(p, q, c);
            eigs.push(hi);
            eigs.push(lo);
        }
    }
    sort_descending(&mut eigs);
    Ok(eigs)
}

fn coupled_block(upper: Complex64, lower: Complex64, bj: Complex64) -> ComplexMatrix {
    // [[|lower|² + |bj|², bj* upper + lower* bj], [.., |upper|² + |bj|²]]
    let off = bj.conj() * upper + lower.conj() * bj;
    let bb = bj.norm_sqr();
    ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::new(lower.norm_sqr() + bb, 0.0),
            off,
            off.conj(),
            Complex64::new(upper.norm_sqr() + bb, 0.0),
        ],
    )
    .expect("finite block")
}

/// `[Y1, Y2, Y3, Y4, Z1, Z2, Z3, Z4]` for diagonal `B`; `X^H X` is similar to
/// their direct sum.
pub fn family1_blocks(spec: &Family1Spec) -> Result<Vec<ComplexMatrix>> {
    if !spec.b_is_diagonal {
        return Err(Error::Parameter("2x2 block reduction needs diagonal B".into()));
    }
    let [a1, a2, a3, a4] = spec.a;
    let ys = spec.b.iter().map(|&bj| coupled_block(a1, a2, bj));
    let zs = spec.b.iter().map(|&bj| coupled_block(a3, a4, bj));
    Ok(ys.chain(zs).collect())
}

/// Eigenvalues of all eight blocks, descending.
pub fn family1_blocks_eigs(spec: &Family1Spec) -> Result<Vec<f64>> {
    let mut eigs = Vec::with_capacity(16);
    for blk in family1_blocks(spec)? {
        let (p, q, z) = (blk[(0, 0)].re, blk[(1, 1)].re, blk[(0, 1)]);
        let (hi, lo) = psd_block_eigs(p, q, z.norm_sqr());
        eigs.push(hi);
        eigs.push(lo);
    }
    sort_descending(&mut eigs);
    Ok(eigs)
}

pub fn random_family1_spec<R: Rng + ?Sized>(rng: &mut R, b_is_diagonal: bool) -> Result<Family1Spec> {
    let a = complex_gaussian_vec(rng, 4);
    let b = complex_gaussian_vec(rng, 4);
    Family1Spec::project(
        a.try_into().expect("length 4"),
        b.try_into().expect("length 4"),
        b_is_diagonal,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::stream_rng;
    use crate::spectrum::{hermitian_eigenvalues, objective};

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn dense_eigs(spec: &Family1Spec) -> Vec<f64> {
        objective(&family1_matrices(spec).unwrap()).unwrap().singular_values_sq
    }

    fn linf(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn uniform_instance() {
        let v = r(1.0 / (4.0 * 2f64.sqrt()));
        let spec = Family1Spec::new([v; 4], [v; 4], false).unwrap();
        let pair = family1_matrices(&spec).unwrap();
        assert_eq!(pair.a().trace(), r(0.0));
        assert_eq!(pair.b().trace(), r(0.0));
        let cf = family1_eigs_closed_form(&spec).unwrap();
        let mut expected = vec![0.125; 8];
        expected.extend([0.0; 8]);
        assert!(linf(&cf, &expected) < 1e-15);
        assert!(linf(&cf, &dense_eigs(&spec)) < 1e-14);
    }

    #[test]
    fn zero_b_decouples() {
        let a = [r(0.4), r(0.2), r(0.1), r(0.0)];
        let n: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let a = a.map(|z| z * (0.25 / n).sqrt());
        let spec = Family1Spec::new(a, [r(0.0); 4], false).unwrap();
        let cf = family1_eigs_closed_form(&spec).unwrap();
        let mut expected: Vec<f64> = a.iter().flat_map(|z| [z.norm_sqr(); 4]).collect();
        sort_descending(&mut expected);
        assert!(linf(&cf, &expected) < 1e-16);
    }

    #[test]
    fn rank_one_overlap_instance() {
        let spec = Family1Spec::new([r(0.5), r(0.0), r(0.0), r(0.0)], [r(0.0); 4], true).unwrap();
        let pair = family1_matrices(&spec).unwrap();
        let nonzero = pair.a().entries().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn diagonal_b_needs_zero_trace() {
        let spec = Family1Spec::new([r(0.0); 4], [r(0.5), r(0.0), r(0.0), r(0.0)], true);
        assert!(matches!(spec, Err(Error::Constraint { .. })));
    }

    #[test]
    fn blocks_special_cases() {
        let a = [r(0.3), r(0.2), r(0.0), r(0.0)];
        let n: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let a = a.map(|z| z * (0.25 / n).sqrt());
        let spec = Family1Spec::new(a, [r(0.0); 4], true).unwrap();
        let blocks = family1_blocks(&spec).unwrap();
        assert_eq!(blocks.len(), 8);
        for y in &blocks[..4] {
            assert_eq!(*y, ComplexMatrix::from_real_diag(&[a[1].norm_sqr(), a[0].norm_sqr()]));
        }

        let b = [r(0.2), r(-0.1), r(0.3), r(-0.4)];
        let a = [r(0.3), r(0.1), r(0.0), r(0.0)];
        let spec = Family1Spec::project(a, b, true).unwrap();
        for (j, z) in family1_blocks(&spec).unwrap()[4..].iter().enumerate() {
            let bb = spec.b()[j].norm_sqr();
            assert_eq!(*z, ComplexMatrix::from_real_diag(&[bb, bb]));
        }
    }

    #[test]
    fn wrong_variant_errors() {
        let v = r(1.0 / (4.0 * 2f64.sqrt()));
        let anti = Family1Spec::new([v; 4], [v; 4], false).unwrap();
        assert!(family1_blocks(&anti).is_err());
        let diag = Family1Spec::new([r(0.5), r(0.0), r(0.0), r(0.0)], [r(0.0); 4], true).unwrap();
        assert!(family1_eigs_closed_form(&diag).is_err());
    }

    #[test]
    fn random_specs_match_dense() {
        let mut rng = stream_rng(9, 0);
        for k in 0..100 {
            let diag = k % 2 == 0;
            let spec = random_family1_spec(&mut rng, diag).unwrap();
            let dense = dense_eigs(&spec);
            let cf = if diag {
                family1_blocks_eigs(&spec).unwrap()
            } else {
                family1_eigs_closed_form(&spec).unwrap()
            };
            assert!(linf(&cf, &dense) < 1e-10);
            if diag {
                // Block eigen-multiset through the generic solver too.
                let mut via_solver: Vec<f64> = family1_blocks(&spec)
                    .unwrap()
                    .iter()
                    .flat_map(|b| hermitian_eigenvalues(b).unwrap())
                    .collect();
                sort_descending(&mut via_solver);
                assert!(linf(&via_solver, &dense) < 1e-10);
            }
        }
    }
}
