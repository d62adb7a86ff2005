#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use qcvx_core::{QMatrix, QVector, Quaternion};

pub fn quat() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-5.0f64..5.0).prop_map(|[a, b, c, d]| Quaternion::new(a, b, c, d))
}

pub fn nonzero_quat() -> impl Strategy<Value = Quaternion> {
    quat().prop_filter("rotator away from zero", |q| q.norm() > 1e-2)
}

pub fn qvec(n: usize) -> impl Strategy<Value = QVector> {
    prop::collection::vec(quat(), n).prop_map(|v| QVector::new(v).unwrap())
}

pub fn qmat(rows: usize, cols: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(quat(), rows * cols)
        .prop_map(move |v| QMatrix::new(rows, cols, v).unwrap())
}

/// Left multiplication by `p` acting on `(w, x, y, z)`, written out from the
/// Hamilton table.
pub fn left_mult(p: Quaternion) -> [[f64; 4]; 4] {
    let (a, b, c, d) = (p.a, p.b, p.c, p.d);
    [[a, -b, -c, -d], [b, a, -d, c], [c, d, a, -b], [d, -c, b, a]]
}

/// Real `4m × 4n` matrix of `x ↦ Mx` in the stacked coordinates
/// `(x_a; x_b; x_c; x_d)`.
pub fn real_rep(m: &QMatrix) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    let mut out = DMatrix::zeros(4 * rows, 4 * cols);
    for s in 0..rows {
        for t in 0..cols {
            let l = left_mult(m.get(s, t));
            for (ci, row) in l.iter().enumerate() {
                for (cj, v) in row.iter().enumerate() {
                    out[(ci * rows + s, cj * cols + t)] = *v;
                }
            }
        }
    }
    out
}

pub fn real_vec(q: &QVector) -> DVector<f64> {
    let n = q.len();
    DVector::from_fn(4 * n, |r, _| {
        let e = q[r % n];
        [e.a, e.b, e.c, e.d][r / n]
    })
}

pub fn from_real_vec(x: &DVector<f64>) -> QVector {
    let n = x.len() / 4;
    QVector::new(
        (0..n)
            .map(|s| Quaternion::new(x[s], x[s + n], x[s + 2 * n], x[s + 3 * n]))
            .collect(),
    )
    .unwrap()
}

/// `‖x‖∞` over real components.
pub fn max_abs_diff(a: &QVector, b: &QVector) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (*x - *y).max_abs())
        .fold(0.0, f64::max)
}

/// Sorted eigenvalues of a real symmetric matrix.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Hermitian matrix from an arbitrary square one.
pub fn hermitize(m: &QMatrix) -> QMatrix {
    m.try_add(&m.hermitian_transpose()).unwrap().scale(0.5)
}

/// `AᴴA + shift·I`.
pub fn gram(a: &QMatrix, shift: f64) -> QMatrix {
    let g = a.hermitian_transpose().matmul(a).unwrap();
    hermitize(&g)
        .try_add(&QMatrix::identity(a.cols()).scale(shift))
        .unwrap()
}
