//! Eigenvalue localization: Gershgorin discs, Brauer ovals of Cassini and the
//! Weyl bound on the second eigenvalue of a Hermitian sum.
//!
//! Regions are kept symbolic (centers, radii, product bounds) and membership
//! is evaluated on demand. All regions are closed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::spectrum::{hermitian_eigenvalues, HERMITIAN_TOL};

/// Union of closed discs `|s - centers[i]| <= radii[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscRegion {
    pub centers: Vec<Complex64>,
    pub radii: Vec<f64>,
}

/// One oval `|s - center_i| |s - center_j| <= product_bound` for the row pair `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CassiniOval {
    pub rows: (usize, usize),
    pub center_i: Complex64,
    pub center_j: Complex64,
    pub product_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CassiniRegion {
    pub pairs: Vec<CassiniOval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Region {
    #[serde(rename = "discs")]
    Discs(DiscRegion),
    #[serde(rename = "cassini")]
    Cassini(CassiniRegion),
}

impl DiscRegion {
    pub fn contains(&self, s: Complex64) -> bool {
        self.contains_inflated(s, 0.0)
    }

    /// Membership with every radius enlarged by `slack`.
    pub fn contains_inflated(&self, s: Complex64, slack: f64) -> bool {
        self.centers
            .iter()
            .zip(&self.radii)
            .any(|(c, r)| (s - c).norm() <= r + slack)
    }

    /// `(re_min, re_max, im_min, im_max)` of the union.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let mut bb = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (c, r) in self.centers.iter().zip(&self.radii) {
            bb.0 = bb.0.min(c.re - r);
            bb.1 = bb.1.max(c.re + r);
            bb.2 = bb.2.min(c.im - r);
            bb.3 = bb.3.max(c.im + r);
        }
        bb
    }
}

impl CassiniRegion {
    pub fn contains(&self, s: Complex64) -> bool {
        self.contains_inflated(s, 0.0)
    }

    /// Membership with every product bound enlarged by `slack`.
    pub fn contains_inflated(&self, s: Complex64, slack: f64) -> bool {
        self.pairs
            .iter()
            .any(|o| (s - o.center_i).norm() * (s - o.center_j).norm() <= o.product_bound + slack)
    }

    /// Largest real point of the union, treating the centers as real (their
    /// imaginary parts are ignored). For a Hermitian matrix this bounds λ1.
    pub fn real_upper_bound(&self) -> f64 {
        self.pairs
            .iter()
            .map(|o| {
                let (ci, cj) = (o.center_i.re, o.center_j.re);
                0.5 * (ci + cj + ((ci - cj).powi(2) + 4.0 * o.product_bound).sqrt())
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Region {
    pub fn contains(&self, s: Complex64) -> bool {
        membership(self, s)
    }

    pub fn contains_inflated(&self, s: Complex64, slack: f64) -> bool {
        match self {
            Region::Discs(r) => r.contains_inflated(s, slack),
            Region::Cassini(r) => r.contains_inflated(s, slack),
        }
    }
}

/// Point query against either kind of region.
pub fn membership(region: &Region, s: Complex64) -> bool {
    match region {
        Region::Discs(r) => r.contains(s),
        Region::Cassini(r) => r.contains(s),
    }
}

fn off_diagonal_row_sums(m: &ComplexMatrix) -> Vec<f64> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, z)| z.norm())
                .sum()
        })
        .collect()
}

pub fn gershgorin(m: &ComplexMatrix) -> Result<DiscRegion> {
    m.ensure_square()?;
    Ok(DiscRegion {
        centers: m.diagonal(),
        radii: off_diagonal_row_sums(m),
    })
}

/// Largest absolute row sum; bounds the modulus of every eigenvalue.
pub fn gershgorin_magnitude_bound(m: &ComplexMatrix) -> Result<f64> {
    let n = m.ensure_square()?;
    Ok((0..n)
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max))
}

/// One oval per unordered row pair.
pub fn brauer(m: &ComplexMatrix) -> Result<CassiniRegion> {
    let n = m.ensure_square()?;
    if n < 2 {
        return Err(Error::Dimension {
            d: n,
            reason: "Brauer ovals need at least two rows",
        });
    }
    let sums = off_diagonal_row_sums(m);
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(CassiniOval {
                rows: (i, j),
                center_i: m[(i, i)],
                center_j: m[(j, j)],
                product_bound: sums[i] * sums[j],
            });
        }
    }
    Ok(CassiniRegion { pairs })
}

/// Upper bound on λ1 of a Hermitian matrix from its Brauer region.
pub fn brauer_lambda_max_bound(h: &ComplexMatrix) -> Result<f64> {
    h.ensure_hermitian(HERMITIAN_TOL)?;
    Ok(brauer(h)?.real_upper_bound())
}

fn ensure_same_hermitian_pair(h1: &ComplexMatrix, h2: &ComplexMatrix) -> Result<usize> {
    let n = h1.ensure_hermitian(HERMITIAN_TOL)?;
    let m = h2.ensure_hermitian(HERMITIAN_TOL)?;
    if n != m {
        return Err(Error::Shape {
            expected: format!("{n}x{n}"),
            got: format!("{m}x{m}"),
        });
    }
    if n < 2 {
        return Err(Error::Dimension {
            d: n,
            reason: "second eigenvalue needs order >= 2",
        });
    }
    Ok(n)
}

/// `λ2(H1) + λ1(H2)`, an upper bound on `λ2(H1 + H2)` (eigenvalues descending).
pub fn weyl_pair_bound(h1: &ComplexMatrix, h2: &ComplexMatrix) -> Result<f64> {
    ensure_same_hermitian_pair(h1, h2)?;
    Ok(hermitian_eigenvalues(h1)?[1] + hermitian_eigenvalues(h2)?[0])
}

/// `λ2(H1)` plus the Brauer bound on `λ1(H2)`; looser than [`weyl_pair_bound`].
pub fn weyl_brauer_bound(h1: &ComplexMatrix, h2: &ComplexMatrix) -> Result<f64> {
    ensure_same_hermitian_pair(h1, h2)?;
    Ok(hermitian_eigenvalues(h1)?[1] + brauer_lambda_max_bound(h2)?)
}
