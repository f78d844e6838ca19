//! Scaled-permutation family: `A = D_A P_A`, `B = D_B P_B` with diagonal
//! `D_A`, `D_B` and fixed-point-free permutations, so that
//! `A(k, σ(k)) = a_k` and `B(k, τ(k)) = b_k`.
//!
//! Permutations are zero-based value maps in memory and one-based in JSON.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::psd_block_eigs;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ConstrainedPair, NORM_TOL};
use crate::sampling::{complex_gaussian, complex_gaussian_vec, random_derangement};
use crate::spectrum::sort_descending;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family2Repr", into = "Family2Repr")]
pub struct Family2Spec {
    d: usize,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    sigma: Vec<usize>,
    tau: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Family2Repr {
    d: usize,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    sigma: Vec<usize>,
    tau: Vec<usize>,
}

fn from_one_based(p: Vec<usize>) -> Result<Vec<usize>> {
    p.into_iter()
        .map(|v| {
            v.checked_sub(1)
                .ok_or_else(|| Error::Permutation("one-based values start at 1".into()))
        })
        .collect()
}

impl TryFrom<Family2Repr> for Family2Spec {
    type Error = Error;

    fn try_from(r: Family2Repr) -> Result<Self> {
        let spec = Family2Spec::new(r.a, r.b, from_one_based(r.sigma)?, from_one_based(r.tau)?)?;
        if spec.d != r.d {
            return Err(Error::Shape {
                expected: format!("d = {}", r.d),
                got: format!("{}", spec.d),
            });
        }
        Ok(spec)
    }
}

impl From<Family2Spec> for Family2Repr {
    fn from(s: Family2Spec) -> Self {
        Family2Repr {
            d: s.d,
            a: s.a,
            b: s.b,
            sigma: s.sigma.iter().map(|v| v + 1).collect(),
            tau: s.tau.iter().map(|v| v + 1).collect(),
        }
    }
}

/// Checks that `p` is a permutation of `0..d` without fixed points.
pub(crate) fn check_derangement(p: &[usize], d: usize, name: &str) -> Result<()> {
    if p.len() != d {
        return Err(Error::Permutation(format!(
            "{name} has length {}, expected {d}",
            p.len()
        )));
    }
    let mut seen = vec![false; d];
    for (k, &v) in p.iter().enumerate() {
        if v >= d || seen[v] {
            return Err(Error::Permutation(format!("{name} is not a permutation of 1..{d}")));
        }
        if v == k {
            return Err(Error::Permutation(format!("{name} fixes {}", k + 1)));
        }
        seen[v] = true;
    }
    Ok(())
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (k, &v) in p.iter().enumerate() {
        inv[v] = k;
    }
    inv
}

fn check_dimension(d: usize) -> Result<()> {
    if d < 4 {
        return Err(Error::Dimension {
            d,
            reason: "the permutation family requires d >= 4",
        });
    }
    Ok(())
}

/// `k -> k + 1 (mod d)`, zero-based.
pub fn cyclic_shift(d: usize) -> Vec<usize> {
    (0..d).map(|k| (k + 1) % d).collect()
}

impl Family2Spec {
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>, sigma: Vec<usize>, tau: Vec<usize>) -> Result<Self> {
        let d = a.len();
        check_dimension(d)?;
        if b.len() != d {
            return Err(Error::Shape {
                expected: format!("{d} entries for b"),
                got: format!("{}", b.len()),
            });
        }
        check_derangement(&sigma, d, "sigma")?;
        check_derangement(&tau, d, "tau")?;
        let norm = (a.iter().chain(&b).map(|z| z.norm_sqr()).sum::<f64>() - 1.0 / d as f64).abs();
        if norm > NORM_TOL {
            return Err(Error::Constraint {
                trace_a: 0.0,
                trace_b: 0.0,
                norm,
            });
        }
        Ok(Self { d, a, b, sigma, tau })
    }

    /// Rescales `a`, `b` so that `Σ|a|² + Σ|b|² = 1/d`.
    pub fn project(mut a: Vec<Complex64>, mut b: Vec<Complex64>, sigma: Vec<usize>, tau: Vec<usize>) -> Result<Self> {
        let d = a.len();
        let norm: f64 = a.iter().chain(&b).map(|z| z.norm_sqr()).sum();
        if norm == 0.0 {
            return Err(Error::Degenerate);
        }
        let s = (1.0 / (d as f64 * norm)).sqrt();
        a.iter_mut().chain(b.iter_mut()).for_each(|z| *z *= s);
        Self::new(a, b, sigma, tau)
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

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn rank_a(&self) -> usize {
        self.a.iter().filter(|z| z.norm() > 0.0).count()
    }
}

fn scaled_permutation(values: &[Complex64], perm: &[usize]) -> ComplexMatrix {
    let d = values.len();
    let mut m = ComplexMatrix::zeros(d, d);
    for (k, (&v, &p)) in values.iter().zip(perm).enumerate() {
        m[(k, p)] = v;
    }
    m
}

pub fn family2_matrices(spec: &Family2Spec) -> Result<ConstrainedPair> {
    ConstrainedPair::new(
        scaled_permutation(&spec.a, &spec.sigma),
        scaled_permutation(&spec.b, &spec.tau),
    )
}

/// Rank-one member: `A = a E_12`, `B(k, τ(k)) = b_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family2Rank1 {
    pub d: usize,
    pub a: Complex64,
    pub b: Vec<Complex64>,
    pub tau: Vec<usize>,
}

impl Family2Rank1 {
    pub fn eigs(&self) -> Result<Vec<f64>> {
        family2_rank1_eigs(self.d, self.a, &self.b, &self.tau)
    }

    pub fn to_pair(&self) -> Result<ConstrainedPair> {
        family2_rank1_pair(self.d, self.a, &self.b, &self.tau)
    }

    /// The same instance as a general family member with `σ` the cyclic shift.
    pub fn to_spec(&self) -> Result<Family2Spec> {
        let mut a = vec![Complex64::new(0.0, 0.0); self.d];
        a[0] = self.a;
        Family2Spec::new(a, self.b.clone(), cyclic_shift(self.d), self.tau.clone())
    }
}

fn check_rank1(d: usize, a: Complex64, b: &[Complex64], tau: &[usize]) -> Result<()> {
    check_dimension(d)?;
    if b.len() != d {
        return Err(Error::Shape {
            expected: format!("{d} entries for b"),
            got: format!("{}", b.len()),
        });
    }
    check_derangement(tau, d, "tau")?;
    let norm = (a.norm_sqr() + b.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0 / d as f64).abs();
    if norm > NORM_TOL {
        return Err(Error::Constraint {
            trace_a: 0.0,
            trace_b: 0.0,
            norm,
        });
    }
    Ok(())
}

/// All `d²` eigenvalues of `X^H X` for the rank-one member, descending:
/// each `|b_j|²` with multiplicity `d - 2`, plus the roots of
/// `λ² - (|a|² + |b_j|² + |b_{τ⁻¹(j)}|²) λ + |b_j|² |b_{τ⁻¹(j)}|²`.
pub fn family2_rank1_eigs(d: usize, a: Complex64, b: &[Complex64], tau: &[usize]) -> Result<Vec<f64>> {
    check_rank1(d, a, b, tau)?;
    let inv = inverse(tau);
    let aa = a.norm_sqr();
    let mut eigs = Vec::with_capacity(d * d);
    for bj in b {
        eigs.extend(std::iter::repeat_n(bj.norm_sqr(), d - 2));
    }
    for (j, bj) in b.iter().enumerate() {
        let p = bj.norm_sqr();
        let q = aa + b[inv[j]].norm_sqr();
        let (hi, lo) = psd_block_eigs(p, q, aa * p);
        eigs.push(hi);
        eigs.push(lo);
    }
    sort_descending(&mut eigs);
    Ok(eigs)
}

pub fn family2_rank1_pair(d: usize, a: Complex64, b: &[Complex64], tau: &[usize]) -> Result<ConstrainedPair> {
    check_rank1(d, a, b, tau)?;
    let mut am = ComplexMatrix::zeros(d, d);
    am[(0, 1)] = a;
    ConstrainedPair::new(am, scaled_permutation(b, tau))
}

/// Gershgorin bound on `λ1(X^H X)`:
/// `max_{i,j} |a_{σ⁻¹(i)}|² + |b_{τ⁻¹(j)}|² + |a_{σ⁻¹(i)}||b_j| + |a_i||b_{τ⁻¹(j)}|`.
pub fn family2_lambda1_bound(spec: &Family2Spec) -> f64 {
    let si = inverse(&spec.sigma);
    let ti = inverse(&spec.tau);
    let mut best = 0.0_f64;
    for (&ip, ai) in si.iter().zip(&spec.a) {
        let a_pre = spec.a[ip].norm();
        let a_i = ai.norm();
        for (&jp, bj) in ti.iter().zip(&spec.b) {
            let b_pre = spec.b[jp].norm();
            let b_j = bj.norm();
            best = best.max(a_pre * a_pre + b_pre * b_pre + a_pre * b_j + a_i * b_pre);
        }
    }
    best
}

/// Random member. Permutations are drawn when not supplied.
pub fn random_family2_spec<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    perms: Option<(Vec<usize>, Vec<usize>)>,
) -> Result<Family2Spec> {
    check_dimension(d)?;
    let a = complex_gaussian_vec(rng, d);
    let b = complex_gaussian_vec(rng, d);
    let (sigma, tau) = match perms {
        Some(p) => p,
        None => (random_derangement(rng, d), random_derangement(rng, d)),
    };
    Family2Spec::project(a, b, sigma, tau)
}

pub fn random_family2_rank1<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Family2Rank1> {
    check_dimension(d)?;
    let a = complex_gaussian(rng);
    let b = complex_gaussian_vec(rng, d);
    let tau = random_derangement(rng, d);
    let norm = a.norm_sqr() + b.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let s = (1.0 / (d as f64 * norm)).sqrt();
    Ok(Family2Rank1 {
        d,
        a: a * s,
        b: b.into_iter().map(|z| z * s).collect(),
        tau,
    })
}
