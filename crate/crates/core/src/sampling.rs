//! Seeded random instances: Gaussian matrices, feasible pairs, unitaries.
//!
//! Every parallel consumer derives its generator with [`stream_rng`], so a
//! master seed fixes all downstream draws regardless of thread scheduling.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::matrix::{project_to_constraints, ComplexMatrix, ConstrainedPair};

/// Independent generator number `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian (independent N(0,1) real and imaginary parts).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn complex_gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n);
    (&g + &g.adjoint()).scale(0.5)
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n).to_nalgebra();
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(&q).expect("finite unitary")
}

/// Uniform draw on the constraint sphere: Gaussian `A`, `B`, then projection.
pub fn random_feasible_pair<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<ConstrainedPair> {
    let a = random_matrix(rng, d, d);
    let b = random_matrix(rng, d, d);
    project_to_constraints(&a, &b)
}

/// Uniformly random permutation of `0..n` with no fixed point (rejection sampling).
pub fn random_derangement<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    assert!(n >= 2, "derangements need n >= 2");
    loop {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            p.swap(i, j);
        }
        if p.iter().enumerate().all(|(i, &v)| i != v) {
            return p;
        }
    }
}
