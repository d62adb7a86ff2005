//! Augmented real (`q_R ∈ ℝ^{4n}`) and augmented quaternion
//! (`q_H = (q, q^i, q^j, q^k) ∈ ℍ^{4n}`) representations, the `J_n` matrix
//! linking them, and the gradient/Hessian transport between the two.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{shape_err, Error, Result};
use crate::qlinalg::{QMatrix, QVector};
use crate::quaternion::{Axis, Quaternion};

/// Imaginary residue tolerated by [`real_hessian_bridge`] before it refuses.
pub const REAL_RESIDUE_TOL: f64 = 1e-6;

/// `q_R = (q_a, q_b, q_c, q_d)` stacked as four blocks of length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedRealVector(pub DVector<f64>);

/// `q_H = (q, q^i, q^j, q^k)` stacked as four blocks of length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedQuaternionVector(pub QVector);

/// The `4n × 4n` matrix with `q_H = J q_R` and `JᴴJ = 4I`.
#[derive(Clone, Debug, PartialEq)]
pub struct JMatrix {
    n: usize,
    mat: QMatrix,
}

/// `H_HH*`, the `4n × 4n` augmented quaternion Hessian. Block `(μ, ν)` holds
/// `H_{q^ν q^{μ*}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedHessian(pub QMatrix);

pub fn to_aug_real(q: &QVector) -> AugmentedRealVector {
    let n = q.len();
    AugmentedRealVector(DVector::from_fn(4 * n, |r, _| q[r % n].component(r / n)))
}

pub fn to_aug_quat(q: &QVector) -> AugmentedQuaternionVector {
    AugmentedQuaternionVector(QVector::concat(&Axis::ALL.map(|ax| q.involution(ax))))
}

impl AugmentedRealVector {
    pub fn dim(&self) -> usize {
        self.0.len() / 4
    }

    pub fn to_qvector(&self) -> Result<QVector> {
        if self.0.is_empty() || !self.0.len().is_multiple_of(4) {
            return Err(shape_err(
                "length divisible by 4",
                format!("{}", self.0.len()),
            ));
        }
        let n = self.dim();
        let r = &self.0;
        QVector::new(
            (0..n)
                .map(|s| Quaternion::new(r[s], r[s + n], r[s + 2 * n], r[s + 3 * n]))
                .collect(),
        )
    }
}

impl AugmentedQuaternionVector {
    pub fn dim(&self) -> usize {
        self.0.len() / 4
    }

    pub fn block(&self, axis: Axis) -> QVector {
        let n = self.dim();
        self.0.segment(axis.index() * n, n)
    }

    /// Largest deviation of blocks 2–4 from the involutions of block 1.
    pub fn structure_deviation(&self) -> f64 {
        let base = self.block(Axis::One);
        Axis::ALL[1..]
            .iter()
            .map(|&ax| {
                self.block(ax)
                    .distance(&base.involution(ax))
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }

    /// Recovers `q` from the first block.
    pub fn to_qvector(&self) -> QVector {
        self.block(Axis::One)
    }
}

pub fn j_matrix(n: usize) -> Result<JMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("J_n requires n >= 1".into()));
    }
    // block (μ, ν) is (unit ν)^μ · I_n
    let mat = QMatrix::from_fn(4 * n, 4 * n, |r, c| {
        if r % n != c % n {
            return Quaternion::ZERO;
        }
        let mu = Axis::from_index(r / n);
        let nu = Axis::from_index(c / n);
        nu.unit().involution(mu)
    });
    Ok(JMatrix { n, mat })
}

impl JMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.mat
    }

    /// `J q_R`.
    pub fn apply_real(&self, r: &AugmentedRealVector) -> Result<AugmentedQuaternionVector> {
        let v = real_to_qvector(&r.0)?;
        Ok(AugmentedQuaternionVector(self.mat.matvec(&v)?))
    }

    /// `¼ Jᴴ h`, checked to be real.
    pub fn to_real(&self, h: &QVector) -> Result<AugmentedRealVector> {
        let v = self.mat.hermitian_transpose().matvec(h)?.scale(0.25);
        let residue = v.iter().map(|q| q.im().max_abs()).fold(0.0, f64::max);
        if residue > REAL_RESIDUE_TOL * v.max_abs().max(1.0) {
            return Err(Error::NotRealResult(residue));
        }
        Ok(AugmentedRealVector(DVector::from_iterator(
            v.len(),
            v.iter().map(|q| q.a),
        )))
    }
}

fn real_to_qvector(r: &DVector<f64>) -> Result<QVector> {
    QVector::new(r.iter().map(|&x| Quaternion::real(x)).collect())
}

pub fn real_matrix_to_qmatrix(m: &DMatrix<f64>) -> QMatrix {
    QMatrix::from_fn(m.nrows(), m.ncols(), |r, c| Quaternion::real(m[(r, c)]))
}

/// Both sides of the augmented inner-product identities for a pair `p, q`.
#[derive(Clone, Debug, Serialize)]
pub struct AugInner {
    /// `p_Hᵀ q_H`, real in exact arithmetic.
    pub re_t: f64,
    /// `p_Hᴴ q_H`, real in exact arithmetic.
    pub herm: f64,
    pub four_re_pt_q: f64,
    pub four_pr_qr: f64,
    pub four_re_ph_q: f64,
    pub two_norm_pr: f64,
    pub norm_ph: f64,
    pub two_norm_p: f64,
    /// Largest imaginary component seen in `p_Hᵀ q_H` and `p_Hᴴ q_H`.
    pub imag_residue: f64,
}

impl AugInner {
    /// Largest absolute gap across the three identity chains.
    pub fn max_violation(&self) -> f64 {
        [
            (self.re_t - self.four_re_pt_q).abs(),
            (self.four_pr_qr - self.herm).abs(),
            (self.herm - self.four_re_ph_q).abs(),
            (self.two_norm_pr - self.norm_ph).abs(),
            (self.norm_ph - self.two_norm_p).abs(),
            self.imag_residue,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn aug_inner(p: &QVector, q: &QVector) -> Result<AugInner> {
    if p.len() != q.len() {
        return Err(shape_err(
            format!("vectors of length {}", p.len()),
            format!("length {}", q.len()),
        ));
    }
    let (ph, qh) = (to_aug_quat(p).0, to_aug_quat(q).0);
    let (pr, qr) = (to_aug_real(p).0, to_aug_real(q).0);
    let t = ph.tdot(&qh)?;
    let h = ph.hdot(&qh)?;
    Ok(AugInner {
        re_t: t.a,
        herm: h.a,
        four_re_pt_q: 4.0 * p.tdot(q)?.a,
        four_pr_qr: 4.0 * pr.dot(&qr),
        four_re_ph_q: 4.0 * p.hdot(q)?.a,
        two_norm_pr: 2.0 * pr.norm(),
        norm_ph: ph.norm(),
        two_norm_p: 2.0 * p.norm(),
        imag_residue: t.im().max_abs().max(h.im().max_abs()),
    })
}

/// `∇_{H*} f = (g, g^i, g^j, g^k)` from `g = ∇_{q*} f` of a real-valued `f`
/// (rotation rule).
pub fn aug_conj_gradient(grad_qconj: &QVector) -> AugmentedQuaternionVector {
    to_aug_quat(grad_qconj)
}

/// `∇_R f = Jᴴ ∇_{H*} f`.
pub fn real_gradient_from_aug(
    j: &JMatrix,
    grad_h: &AugmentedQuaternionVector,
) -> Result<AugmentedRealVector> {
    // to_real applies ¼Jᴴ
    let r = j.to_real(&grad_h.0)?;
    Ok(AugmentedRealVector(r.0 * 4.0))
}

/// `∇_{H*} f = ¼ J ∇_R f`.
pub fn aug_gradient_from_real(
    j: &JMatrix,
    grad_r: &AugmentedRealVector,
) -> Result<AugmentedQuaternionVector> {
    let h = j.apply_real(grad_r)?;
    Ok(AugmentedQuaternionVector(h.0.scale(0.25)))
}

/// Assembles `H_HH*` from its first block row `H_{q^ν q*}`, `ν = 1, i, j, k`.
///
/// For real-valued `f` the rotation rule gives
/// `H_{q^ν q^{μ*}} = (H_{q^{μν} q*})^μ`, where `μν` composes the two
/// involutions, so the remaining rows are involutions of the first.
pub fn assemble_aug_hessian(first_row: &[QMatrix; 4]) -> Result<AugmentedHessian> {
    let n = first_row[0].rows();
    for b in first_row {
        if b.shape() != (n, n) {
            return Err(shape_err(
                format!("{n}x{n} block"),
                format!("{:?}", b.shape()),
            ));
        }
    }
    let blocks: Vec<Vec<QMatrix>> = Axis::ALL
        .iter()
        .map(|&mu| {
            Axis::ALL
                .iter()
                .map(|&nu| first_row[mu.compose(nu).index()].involution(mu))
                .collect()
        })
        .collect();
    Ok(AugmentedHessian(QMatrix::from_blocks(&blocks)?))
}

impl AugmentedHessian {
    pub fn dim(&self) -> usize {
        self.0.rows() / 4
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.0
    }

    /// Block `H_{q^ν q^{μ*}}` at block row `mu`, block column `nu`.
    pub fn block(&self, mu: Axis, nu: Axis) -> QMatrix {
        self.0.block(mu.index(), nu.index(), self.dim())
    }

    pub fn first_row(&self) -> [QMatrix; 4] {
        Axis::ALL.map(|nu| self.block(Axis::One, nu))
    }
}

/// `H_RR = Jᴴ H_HH* J`, refusing if the product is not real to within
/// [`REAL_RESIDUE_TOL`] (scaled by the magnitude of the result).
pub fn real_hessian_bridge(h: &AugmentedHessian) -> Result<DMatrix<f64>> {
    let n = h.dim();
    if h.0.shape() != (4 * n, 4 * n) || n == 0 {
        return Err(shape_err("4n x 4n matrix", format!("{:?}", h.0.shape())));
    }
    let j = j_matrix(n)?;
    let hrr = j.mat.hermitian_transpose().matmul(&h.0)?.matmul(&j.mat)?;
    let residue = (0..4 * n)
        .flat_map(|r| (0..4 * n).map(move |c| (r, c)))
        .map(|(r, c)| hrr.get(r, c).im().max_abs())
        .fold(0.0, f64::max);
    if residue > REAL_RESIDUE_TOL * hrr.max_abs().max(1.0) {
        return Err(Error::NotRealResult(residue));
    }
    Ok(DMatrix::from_fn(4 * n, 4 * n, |r, c| hrr.get(r, c).a))
}

/// `H_HH* = (1/16) J H_RR Jᴴ`.
pub fn aug_hessian_from_real(hrr: &DMatrix<f64>) -> Result<AugmentedHessian> {
    let dim = hrr.nrows();
    if dim == 0 || !dim.is_multiple_of(4) || hrr.ncols() != dim {
        return Err(shape_err(
            "4n x 4n matrix",
            format!("{}x{}", hrr.nrows(), hrr.ncols()),
        ));
    }
    let j = j_matrix(dim / 4)?;
    let m = j
        .mat
        .matmul(&real_matrix_to_qmatrix(hrr))?
        .matmul(&j.mat.hermitian_transpose())?;
    Ok(AugmentedHessian(m.scale(1.0 / 16.0)))
}

/// Real `4m × 4n` matrix of the map `q ↦ A q` on augmented real vectors,
/// computed as `¼ J_mᴴ diag(A, A^i, A^j, A^k) J_n`.
pub fn aug_real_matrix(a: &QMatrix) -> Result<DMatrix<f64>> {
    let (m, n) = a.shape();
    let ah = aug_block_diag(a);
    let jm = j_matrix(m)?;
    let jn = j_matrix(n)?;
    let ar = jm
        .mat
        .hermitian_transpose()
        .matmul(&ah)?
        .matmul(&jn.mat)?
        .scale(0.25);
    let residue = (0..4 * m)
        .flat_map(|r| (0..4 * n).map(move |c| (r, c)))
        .map(|(r, c)| ar.get(r, c).im().max_abs())
        .fold(0.0, f64::max);
    if residue > REAL_RESIDUE_TOL * ar.max_abs().max(1.0) {
        return Err(Error::NotRealResult(residue));
    }
    Ok(DMatrix::from_fn(4 * m, 4 * n, |r, c| ar.get(r, c).a))
}

/// `A_H = diag(A, A^i, A^j, A^k)`.
pub fn aug_block_diag(a: &QMatrix) -> QMatrix {
    let (m, n) = a.shape();
    let parts = Axis::ALL.map(|ax| a.involution(ax));
    QMatrix::from_fn(4 * m, 4 * n, |r, c| {
        if r / m == c / n {
            parts[r / m].get(r % m, c % n)
        } else {
            Quaternion::ZERO
        }
    })
}
