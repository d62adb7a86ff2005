//! Dense quaternion vectors and matrices.
//!
//! Solving, inversion and Hermitian eigenvalues go through the complex
//! adjoint. With the Cayley–Dickson split `q = z1 + z2 j`, where
//! `z1 = a + b i` and `z2 = c + d i`, an `m × n` quaternion matrix
//! `Q = Z1 + Z2 j` maps to the `2m × 2n` complex matrix
//!
//! ```text
//! [  Z1        Z2      ]
//! [ -conj(Z2)  conj(Z1) ]
//! ```
//!
//! The map is an injective ring homomorphism, so products, inverses and
//! linear solves carry over. For Hermitian quaternion matrices the adjoint
//! is Hermitian and its spectrum is the quaternion (right) spectrum with
//! every eigenvalue doubled. Outside the Hermitian case the adjoint
//! eigenvalues say nothing about definiteness in the `Re{xᴴAx}` sense, so
//! every definiteness routine here insists on a Hermitian input.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{shape_err, Error, Result};
use crate::quaternion::{Axis, Quaternion};

/// Tolerance used when checking `Mᴴ = M`, scaled by `max(1, max |M_st|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Adjoint condition estimate above which a matrix is treated as singular.
pub const SINGULAR_COND: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct QVector {
    data: Vec<Quaternion>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

/// Complex adjoint image of a [`QMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexAdjoint(pub DMatrix<Complex64>);

fn split(q: Quaternion) -> (Complex64, Complex64) {
    (Complex64::new(q.a, q.b), Complex64::new(q.c, q.d))
}

fn join(z1: Complex64, z2: Complex64) -> Quaternion {
    Quaternion::new(z1.re, z1.im, z2.re, z2.im)
}

impl QVector {
    pub fn new(data: Vec<Quaternion>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(bad) = data.iter().find(|q| !q.is_finite()) {
            return Err(Error::NonFinite(
                bad.to_array()
                    .into_iter()
                    .find(|x| !x.is_finite())
                    .unwrap_or(f64::NAN),
            ));
        }
        Ok(QVector { data })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "QVector length must be positive");
        QVector {
            data: vec![Quaternion::ZERO; n],
        }
    }

    /// Standard basis vector `e_idx`.
    pub fn basis(n: usize, idx: usize) -> Self {
        let mut v = Self::zeros(n);
        v.data[idx] = Quaternion::ONE;
        v
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Quaternion::real(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Quaternion> {
        self.data.iter()
    }

    pub fn into_vec(self) -> Vec<Quaternion> {
        self.data
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> QVector {
        QVector {
            data: self.data.iter().map(|&q| f(q)).collect(),
        }
    }

    pub fn conj(&self) -> QVector {
        self.map(Quaternion::conj)
    }

    pub fn involution(&self, axis: Axis) -> QVector {
        self.map(|q| q.involution(axis))
    }

    pub fn scale(&self, s: f64) -> QVector {
        self.map(|q| q * s)
    }

    /// Right multiplication by a quaternion scalar, entrywise `x_s β`.
    pub fn mul_right(&self, beta: Quaternion) -> QVector {
        self.map(|q| q * beta)
    }

    /// Left multiplication by a quaternion scalar, entrywise `α x_s`.
    pub fn mul_left(&self, alpha: Quaternion) -> QVector {
        self.map(|q| alpha * q)
    }

    /// `selfᴴ other = Σ conj(x_s) y_s`.
    pub fn hdot(&self, other: &QVector) -> Result<Quaternion> {
        self.check_len(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(Quaternion::ZERO, |acc, (&x, &y)| acc + x.conj() * y))
    }

    /// Unconjugated `selfᵀ other = Σ x_s y_s`.
    pub fn tdot(&self, other: &QVector) -> Result<Quaternion> {
        self.check_len(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(Quaternion::ZERO, |acc, (&x, &y)| acc + x * y))
    }

    /// `Re{selfᴴ other}`, the real inner product of the underlying `ℝ^{4n}` vectors.
    pub fn real_inner(&self, other: &QVector) -> Result<f64> {
        self.check_len(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x.a * y.a + x.b * y.b + x.c * y.c + x.d * y.d)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest absolute real component.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.max_abs()).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &QVector) -> Result<f64> {
        self.check_len(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&x, &y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn concat(parts: &[QVector]) -> QVector {
        QVector {
            data: parts.iter().flat_map(|p| p.data.iter().copied()).collect(),
        }
    }

    /// Sub-vector `[start, start + len)`.
    pub fn segment(&self, start: usize, len: usize) -> QVector {
        QVector {
            data: self.data[start..start + len].to_vec(),
        }
    }

    fn check_len(&self, other: &QVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(shape_err(
                format!("vector of length {}", self.len()),
                format!("length {}", other.len()),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &QVector) -> Result<QVector> {
        self.check_len(other)?;
        Ok(QVector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| x + y)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &QVector) -> Result<QVector> {
        self.check_len(other)?;
        Ok(QVector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| x - y)
                .collect(),
        })
    }

    /// `n × 1` matrix view.
    pub fn to_column(&self) -> QMatrix {
        QMatrix {
            rows: self.len(),
            cols: 1,
            data: self.data.clone(),
        }
    }

    /// `1 × n` matrix holding `selfᴴ`.
    pub fn to_hermitian_row(&self) -> QMatrix {
        QMatrix {
            rows: 1,
            cols: self.len(),
            data: self.data.iter().map(|q| q.conj()).collect(),
        }
    }
}

impl Index<usize> for QVector {
    type Output = Quaternion;

    fn index(&self, idx: usize) -> &Quaternion {
        &self.data[idx]
    }
}

impl IndexMut<usize> for QVector {
    fn index_mut(&mut self, idx: usize) -> &mut Quaternion {
        &mut self.data[idx]
    }
}

impl Add for &QVector {
    type Output = QVector;

    fn add(self, rhs: &QVector) -> QVector {
        self.try_add(rhs).expect("vector length mismatch")
    }
}

impl Sub for &QVector {
    type Output = QVector;

    fn sub(self, rhs: &QVector) -> QVector {
        self.try_sub(rhs).expect("vector length mismatch")
    }
}

impl Serialize for QVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.data.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let data = Vec::<Quaternion>::deserialize(d)?;
        QVector::new(data).map_err(serde::de::Error::custom)
    }
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Quaternion>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(shape_err(
                format!("{} entries", rows * cols),
                format!("{}", data.len()),
            ));
        }
        if data.iter().any(|q| !q.is_finite()) {
            return Err(Error::NonFinite(f64::NAN));
        }
        Ok(QMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(shape_err(
                format!("rows of length {n}"),
                format!("row of length {}", bad.len()),
            ));
        }
        Self::new(m, n, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Quaternion) -> Self {
        assert!(rows > 0 && cols > 0, "QMatrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Quaternion::ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar_identity(n, Quaternion::ONE)
    }

    /// `s I_n` for a quaternion scalar `s`.
    pub fn scalar_identity(n: usize, s: Quaternion) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { s } else { Quaternion::ZERO })
    }

    pub fn diag(entries: &[Quaternion]) -> Self {
        let n = entries.len();
        Self::from_fn(
            n,
            n,
            |r, c| if r == c { entries[r] } else { Quaternion::ZERO },
        )
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let q: Vec<Quaternion> = entries.iter().map(|&x| Quaternion::real(x)).collect();
        Self::diag(&q)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, q: Quaternion) {
        self.data[r * self.cols + c] = q;
    }

    pub fn row(&self, r: usize) -> QVector {
        QVector {
            data: self.data[r * self.cols..(r + 1) * self.cols].to_vec(),
        }
    }

    pub fn col(&self, c: usize) -> QVector {
        QVector {
            data: (0..self.rows).map(|r| self.get(r, c)).collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<Quaternion>> {
        self.data
            .chunks(self.cols)
            .map(<[Quaternion]>::to_vec)
            .collect()
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&q| f(q)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> QMatrix {
        self.map(|q| q * s)
    }

    /// Entrywise involution `M^μ`.
    pub fn involution(&self, axis: Axis) -> QMatrix {
        self.map(|q| q.involution(axis))
    }

    pub fn transpose(&self) -> QMatrix {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Conjugate transpose `Mᴴ`.
    pub fn hermitian_transpose(&self) -> QMatrix {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.max_abs()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute component of `self - other`.
    pub fn max_diff(&self, other: &QMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&x, &y)| (x - y).max_abs())
            .fold(0.0, f64::max))
    }

    fn check_same_shape(&self, other: &QMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(shape_err(
                format!("{:?}", self.shape()),
                format!("{:?}", other.shape()),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &QMatrix) -> Result<QMatrix> {
        self.check_same_shape(other)?;
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| x + y)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &QMatrix) -> Result<QMatrix> {
        self.check_same_shape(other)?;
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| x - y)
                .collect(),
        })
    }

    /// `C_st = Σ_u A_su B_ut`, with `A` always the left factor.
    pub fn matmul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(shape_err(
                format!("right operand with {} rows", self.cols),
                format!("{} rows", other.rows),
            ));
        }
        Ok(Self::from_fn(self.rows, other.cols, |r, c| {
            (0..self.cols).fold(Quaternion::ZERO, |acc, u| {
                acc + self.get(r, u) * other.get(u, c)
            })
        }))
    }

    pub fn matvec(&self, x: &QVector) -> Result<QVector> {
        if self.cols != x.len() {
            return Err(shape_err(
                format!("vector of length {}", self.cols),
                format!("length {}", x.len()),
            ));
        }
        Ok(QVector {
            data: (0..self.rows)
                .map(|r| {
                    (0..self.cols).fold(Quaternion::ZERO, |acc, u| acc + self.get(r, u) * x[u])
                })
                .collect(),
        })
    }

    /// Principal submatrix on the given index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> QMatrix {
        Self::from_fn(idx.len(), idx.len(), |r, c| self.get(idx[r], idx[c]))
    }

    /// Block `(br, bc)` of size `size × size`.
    pub fn block(&self, br: usize, bc: usize, size: usize) -> QMatrix {
        Self::from_fn(size, size, |r, c| self.get(br * size + r, bc * size + c))
    }

    /// Assembles a square block matrix from a grid of equally sized square blocks.
    pub fn from_blocks(blocks: &[Vec<QMatrix>]) -> Result<QMatrix> {
        let nb = blocks.len();
        let size = blocks
            .first()
            .and_then(|r| r.first())
            .map(QMatrix::rows)
            .ok_or(Error::Empty)?;
        for row in blocks {
            if row.len() != nb {
                return Err(shape_err(
                    format!("{nb} blocks per row"),
                    format!("{}", row.len()),
                ));
            }
            for b in row {
                if b.shape() != (size, size) {
                    return Err(shape_err(
                        format!("{size}x{size} block"),
                        format!("{:?}", b.shape()),
                    ));
                }
            }
        }
        Ok(Self::from_fn(nb * size, nb * size, |r, c| {
            blocks[r / size][c / size].get(r % size, c % size)
        }))
    }

    /// Largest absolute component of `Mᴴ - M`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self.get(r, c) - self.get(c, r).conj()).max_abs());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * self.max_abs().max(1.0)
    }

    fn require_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(shape_err("square matrix", format!("{:?}", self.shape())));
        }
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(())
    }

    pub fn to_complex_adjoint(&self) -> ComplexAdjoint {
        let (m, n) = self.shape();
        let mut out = DMatrix::<Complex64>::zeros(2 * m, 2 * n);
        for r in 0..m {
            for c in 0..n {
                let (z1, z2) = split(self.get(r, c));
                out[(r, c)] = z1;
                out[(r, c + n)] = z2;
                out[(r + m, c)] = -z2.conj();
                out[(r + m, c + n)] = z1.conj();
            }
        }
        ComplexAdjoint(out)
    }

    pub fn from_complex_adjoint(adj: &ComplexAdjoint) -> Result<QMatrix> {
        let c = &adj.0;
        if !c.nrows().is_multiple_of(2)
            || !c.ncols().is_multiple_of(2)
            || c.nrows() == 0
            || c.ncols() == 0
        {
            return Err(shape_err(
                "even, nonzero dimensions",
                format!("{}x{}", c.nrows(), c.ncols()),
            ));
        }
        let (m, n) = (c.nrows() / 2, c.ncols() / 2);
        let mut dev: f64 = 0.0;
        for r in 0..m {
            for k in 0..n {
                dev = dev.max((c[(r + m, k)] + c[(r, k + n)].conj()).norm());
                dev = dev.max((c[(r + m, k + n)] - c[(r, k)].conj()).norm());
            }
        }
        if dev > 1e-10 {
            return Err(Error::NotAdjointStructured(dev));
        }
        QMatrix::new(
            m,
            n,
            (0..m)
                .flat_map(|r| (0..n).map(move |k| join(c[(r, k)], c[(r, k + n)])))
                .collect(),
        )
    }

    /// Ratio of extreme singular values of the complex adjoint.
    pub fn condition_estimate(&self) -> f64 {
        let sv = self.to_complex_adjoint().0.singular_values();
        let max = sv.max();
        let min = sv.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Numerical rank, read off the adjoint singular values (each quaternion
    /// singular value appears twice).
    pub fn rank(&self) -> usize {
        let sv = self.to_complex_adjoint().0.singular_values();
        let max = sv.max();
        if max == 0.0 {
            return 0;
        }
        let tol = max * 1e-10 * (2 * self.rows.max(self.cols)) as f64;
        sv.iter().filter(|&&s| s > tol).count() / 2
    }

    fn require_nonsingular(&self) -> Result<()> {
        if !self.is_square() {
            return Err(shape_err("square matrix", format!("{:?}", self.shape())));
        }
        let cond = self.condition_estimate();
        if cond.is_nan() || cond > SINGULAR_COND {
            return Err(Error::Singular(cond));
        }
        Ok(())
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &QVector) -> Result<QVector> {
        self.require_nonsingular()?;
        let n = self.rows;
        if b.len() != n {
            return Err(shape_err(
                format!("right-hand side of length {n}"),
                format!("length {}", b.len()),
            ));
        }
        // first column of the adjoint of b, [B1; -conj(B2)]
        let rhs = DVector::<Complex64>::from_fn(2 * n, |r, _| {
            if r < n {
                split(b[r]).0
            } else {
                -split(b[r - n]).1.conj()
            }
        });
        let lu = self.to_complex_adjoint().0.lu();
        let u = lu.solve(&rhs).ok_or(Error::Singular(f64::INFINITY))?;
        QVector::new((0..n).map(|r| join(u[r], -u[r + n].conj())).collect())
    }

    pub fn invert(&self) -> Result<QMatrix> {
        self.require_nonsingular()?;
        let inv = self
            .to_complex_adjoint()
            .0
            .try_inverse()
            .ok_or(Error::Singular(f64::INFINITY))?;
        let inv = symmetrize_adjoint(inv);
        QMatrix::from_complex_adjoint(&ComplexAdjoint(inv))
    }

    fn hermitian_adjoint_eigen(&self) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>> {
        self.require_hermitian()?;
        let c = self.to_complex_adjoint().0;
        let sym = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(SymmetricEigen::new(sym))
    }

    /// Right eigenvalues of a Hermitian quaternion matrix, ascending.
    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        let eig = self.hermitian_adjoint_eigen()?;
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals.into_iter().step_by(2).collect())
    }

    /// All `2n` eigenvalues of the Hermitian complex adjoint, ascending.
    pub fn adjoint_eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = self.hermitian_adjoint_eigen()?;
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    /// Smallest eigenvalue and a unit quaternion eigenvector `x` with `M x = λ x`.
    pub fn min_eigenpair(&self) -> Result<(f64, QVector)> {
        let eig = self.hermitian_adjoint_eigen()?;
        let n = self.rows;
        let (idx, &lambda) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .ok_or(Error::Empty)?;
        let v = eig.eigenvectors.column(idx);
        // column [X1; -conj(X2)] of the adjoint of x = X1 + X2 j
        let x = QVector::new((0..n).map(|r| join(v[r], -v[r + n].conj())).collect())?;
        let norm = x.norm();
        Ok((lambda, x.scale(1.0 / norm)))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues_hermitian()?[0])
    }

    /// Scale-aware PSD tolerance `1e-9 · max(1, ρ(M))`.
    pub fn default_psd_tol(&self) -> Result<f64> {
        let vals = self.eigenvalues_hermitian()?;
        let rho = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        Ok(1e-9 * rho.max(1.0))
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }

    pub fn is_pd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? > tol)
    }

    /// `Re{xᴴ M y}`.
    pub fn real_bilinear(&self, x: &QVector, y: &QVector) -> Result<f64> {
        if x.len() != self.rows {
            return Err(shape_err(
                format!("left vector of length {}", self.rows),
                format!("length {}", x.len()),
            ));
        }
        let my = self.matvec(y)?;
        x.real_inner(&my)
    }
}

// An inverse of an adjoint is an adjoint in exact arithmetic; average the
// two copies of each block so rounding does not trip the structure check.
fn symmetrize_adjoint(mut c: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let m = c.nrows() / 2;
    let n = c.ncols() / 2;
    for r in 0..m {
        for k in 0..n {
            let z1 = (c[(r, k)] + c[(r + m, k + n)].conj()) * 0.5;
            let z2 = (c[(r, k + n)] - c[(r + m, k)].conj()) * 0.5;
            c[(r, k)] = z1;
            c[(r + m, k + n)] = z1.conj();
            c[(r, k + n)] = z2;
            c[(r + m, k)] = -z2.conj();
        }
    }
    c
}

impl ComplexAdjoint {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// Adjoint of a column vector: the `2n × 2` image of an `n × 1` matrix.
    pub fn of_vector(x: &QVector) -> ComplexAdjoint {
        x.to_column().to_complex_adjoint()
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;

    fn mul(self, rhs: &QMatrix) -> QMatrix {
        self.matmul(rhs).expect("matrix shape mismatch")
    }
}

impl Mul<&QVector> for &QMatrix {
    type Output = QVector;

    fn mul(self, rhs: &QVector) -> QVector {
        self.matvec(rhs).expect("matrix-vector shape mismatch")
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;

    fn add(self, rhs: &QMatrix) -> QMatrix {
        self.try_add(rhs).expect("matrix shape mismatch")
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;

    fn sub(self, rhs: &QMatrix) -> QMatrix {
        self.try_sub(rhs).expect("matrix shape mismatch")
    }
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Quaternion>>::deserialize(d)?;
        QMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
