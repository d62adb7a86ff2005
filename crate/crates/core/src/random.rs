//! Seeded generators for quaternion test data. Every randomized path in the
//! crate draws from a [`QRng`] built by [`seeded`], so runs are reproducible
//! from a single integer seed.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::qlinalg::{QMatrix, QVector};
use crate::quaternion::Quaternion;

pub type QRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> QRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut QRng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn uniform(rng: &mut QRng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

/// Quaternion with i.i.d. standard normal components.
pub fn random_quaternion(rng: &mut QRng) -> Quaternion {
    Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng))
}

/// Unit-modulus quaternion, uniform on the 3-sphere.
pub fn random_unit_quaternion(rng: &mut QRng) -> Quaternion {
    loop {
        let q = random_quaternion(rng);
        let n = q.norm();
        if n > 1e-8 {
            return q / n;
        }
    }
}

pub fn random_vector(rng: &mut QRng, n: usize) -> QVector {
    QVector::new((0..n).map(|_| random_quaternion(rng)).collect()).expect("positive length")
}

pub fn random_matrix(rng: &mut QRng, rows: usize, cols: usize) -> QMatrix {
    let data = (0..rows * cols).map(|_| random_quaternion(rng)).collect();
    QMatrix::new(rows, cols, data).expect("positive dimensions")
}

/// Random Hermitian matrix `(B + Bᴴ)/2`.
pub fn random_hermitian(rng: &mut QRng, n: usize) -> QMatrix {
    let b = random_matrix(rng, n, n);
    (&b + &b.hermitian_transpose()).scale(0.5)
}

/// Gram matrix `AᴴA + shift·I` with `A` of size `rows × n`.
pub fn random_gram(rng: &mut QRng, rows: usize, n: usize, shift: f64) -> QMatrix {
    let a = random_matrix(rng, rows, n);
    let g = &a.hermitian_transpose() * &a;
    &g + &QMatrix::scalar_identity(n, Quaternion::real(shift))
}
