use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ConstrainedPair, NORM_TOL, TRACE_TOL};
use crate::sampling::complex_gaussian_vec;
use crate::spectrum::sort_descending;

/// Eigenvalues `a`, `b` of diagonal (normal) factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormalRepr", into = "NormalRepr")]
pub struct NormalSpec {
    d: usize,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct NormalRepr {
    d: usize,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl TryFrom<NormalRepr> for NormalSpec {
    type Error = Error;

    fn try_from(r: NormalRepr) -> Result<Self> {
        let spec = NormalSpec::new(r.a, r.b)?;
        if spec.d != r.d {
            return Err(Error::Shape {
                expected: format!("d = {}", r.d),
                got: format!("{} eigenvalues", spec.d),
            });
        }
        Ok(spec)
    }
}

impl From<NormalSpec> for NormalRepr {
    fn from(s: NormalSpec) -> Self {
        NormalRepr { d: s.d, a: s.a, b: s.b }
    }
}

impl NormalSpec {
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        let d = a.len();
        if b.len() != d {
            return Err(Error::Shape {
                expected: format!("{d} eigenvalues for B"),
                got: format!("{}", b.len()),
            });
        }
        if d < 3 {
            return Err(Error::Dimension {
                d,
                reason: "normal specs require d >= 3",
            });
        }
        let trace_a = a.iter().sum::<Complex64>().norm();
        let trace_b = b.iter().sum::<Complex64>().norm();
        let norm = (a.iter().chain(&b).map(|z| z.norm_sqr()).sum::<f64>() - 1.0 / d as f64).abs();
        if trace_a > TRACE_TOL || trace_b > TRACE_TOL || norm > NORM_TOL {
            return Err(Error::Constraint { trace_a, trace_b, norm });
        }
        Ok(Self { d, a, b })
    }

    pub fn from_real(a: &[f64], b: &[f64]) -> Result<Self> {
        let lift = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(lift(a), lift(b))
    }

    /// Mean removal on `a` and `b`, then a common rescale onto the norm sphere.
    pub fn project(mut a: Vec<Complex64>, mut b: Vec<Complex64>) -> Result<Self> {
        let d = a.len();
        for v in [&mut a, &mut b] {
            let mean = v.iter().sum::<Complex64>() / d as f64;
            v.iter_mut().for_each(|z| *z -= mean);
        }
        let norm: f64 = a.iter().chain(&b).map(|z| z.norm_sqr()).sum();
        if norm == 0.0 {
            return Err(Error::Degenerate);
        }
        let s = (1.0 / (d as f64 * norm)).sqrt();
        a.iter_mut().chain(b.iter_mut()).for_each(|z| *z *= s);
        Self::new(a, b)
    }

    /// The d = 3 instance whose objective is 5/9.
    pub fn d3_reference() -> Self {
        let k = 1.0 / (3.0 * 10f64.sqrt());
        Self::from_real(&[4.0 * k, -2.0 * k, -2.0 * k], &[k, k, -2.0 * k]).expect("reference instance is feasible")
    }

    /// `a = b = (1/4, -1/4, 0, 0)`, objective 1/2.
    pub fn d4_saturating() -> Self {
        Self::from_real(&[0.25, -0.25, 0.0, 0.0], &[0.25, -0.25, 0.0, 0.0]).expect("feasible")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    /// `(diag(a), diag(b))`.
    pub fn to_pair(&self) -> Result<ConstrainedPair> {
        ConstrainedPair::new(ComplexMatrix::from_diag(&self.a), ComplexMatrix::from_diag(&self.b))
    }
}

/// Max over `(i,j) ≠ (k,l)` of `|a_i + b_j|² + |a_k + b_l|²`.
pub fn normal_objective(spec: &NormalSpec) -> f64 {
    let mut sums: Vec<f64> = spec
        .a
        .iter()
        .flat_map(|ai| spec.b.iter().map(move |bj| (ai + bj).norm_sqr()))
        .collect();
    sort_descending(&mut sums);
    sums[0] + sums[1]
}

/// `(3d - 4)/d²`, the maximum of `|a_1 + b_1|² + |a_1 + b_2|²` over feasible
/// eigenvalue vectors.
pub fn pp_ab_maximum(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::Dimension {
            d,
            reason: "requires d >= 3",
        });
    }
    let d = d as f64;
    Ok((3.0 * d - 4.0) / (d * d))
}

pub fn random_normal_spec<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<NormalSpec> {
    NormalSpec::project(complex_gaussian_vec(rng, d), complex_gaussian_vec(rng, d))
}
