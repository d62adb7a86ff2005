//! GHR derivatives of functions of quaternion vectors.
//!
//! The numeric route builds left GHR derivatives from central-difference
//! real partials:
//!
//! ```text
//! ∂f/∂q^μ  = ¼ (f_a − f_b i^μ − f_c j^μ − f_d k^μ)
//! ∂f/∂q^μ* = ¼ (f_a + f_b i^μ + f_c j^μ + f_d k^μ)
//! ```
//!
//! where `i^μ = μ i μ⁻¹` and the rotated units multiply the partials from the
//! right. The analytic route covers quadratic objectives and the
//! standard forms in [`StandardForm`]. Gradients use the column convention
//! `∇_q f = (∂f/∂q)ᵀ`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::augmented::{to_aug_real, AugmentedRealVector};
use crate::error::{shape_err, Error, Result};
use crate::qlinalg::{QMatrix, QVector, HERMITIAN_TOL};
use crate::quaternion::Quaternion;

/// A real-valued function on `ℍⁿ`. Implementations must be pure.
pub trait ScalarField {
    fn eval(&self, q: &QVector) -> f64;
}

impl<F: Fn(&QVector) -> f64> ScalarField for F {
    fn eval(&self, q: &QVector) -> f64 {
        self(q)
    }
}

/// `f(q) = qᴴRq − pᴴq − qᴴp + c` with Hermitian `R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticObjective {
    #[serde(rename = "R")]
    r: QMatrix,
    p: QVector,
    c: f64,
}

#[derive(Deserialize)]
struct RawObjective {
    #[serde(rename = "R")]
    r: QMatrix,
    p: QVector,
    #[serde(default)]
    c: f64,
}

impl<'de> Deserialize<'de> for QuadraticObjective {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawObjective::deserialize(d)?;
        QuadraticObjective::new(raw.r, raw.p, raw.c).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientResult {
    pub grad_q: QVector,
    pub grad_qconj: QVector,
}

impl QuadraticObjective {
    pub fn new(r: QMatrix, p: QVector, c: f64) -> Result<Self> {
        if !r.is_square() {
            return Err(shape_err("square R", format!("{:?}", r.shape())));
        }
        if p.len() != r.rows() {
            return Err(shape_err(
                format!("p of length {}", r.rows()),
                format!("length {}", p.len()),
            ));
        }
        if !c.is_finite() {
            return Err(Error::NonFinite(c));
        }
        let dev = r.hermitian_deviation();
        if dev > HERMITIAN_TOL * r.max_abs().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(QuadraticObjective { r, p, c })
    }

    /// `‖A q − b‖² = qᴴ(AᴴA)q − (Aᴴb)ᴴq − qᴴ(Aᴴb) + ‖b‖²`.
    pub fn least_squares(a: &QMatrix, b: &QVector) -> Result<Self> {
        let ah = a.hermitian_transpose();
        let r = ah.matmul(a)?;
        // AᴴA is Hermitian up to rounding; symmetrize so the invariant is exact
        let r = (&r + &r.hermitian_transpose()).scale(0.5);
        Self::new(r, ah.matvec(b)?, b.norm_sqr())
    }

    /// `‖q‖²`.
    pub fn squared_norm(n: usize) -> Self {
        Self::new(QMatrix::identity(n), QVector::zeros(n), 0.0).expect("identity is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn r(&self) -> &QMatrix {
        &self.r
    }

    pub fn p(&self) -> &QVector {
        &self.p
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    fn check_dim(&self, q: &QVector) -> Result<()> {
        if q.len() != self.dim() {
            return Err(shape_err(
                format!("point of length {}", self.dim()),
                format!("length {}", q.len()),
            ));
        }
        Ok(())
    }

    /// `Re{qᴴRq} − 2 Re{pᴴq} + c`.
    pub fn evaluate(&self, q: &QVector) -> Result<f64> {
        self.check_dim(q)?;
        Ok(self.r.real_bilinear(q, q)? - 2.0 * self.p.real_inner(q)? + self.c)
    }

    /// `∇_{q*} f = ½(Rq − p)`.
    pub fn gradient_conjugate(&self, q: &QVector) -> Result<QVector> {
        self.check_dim(q)?;
        Ok(self.r.matvec(q)?.try_sub(&self.p)?.scale(0.5))
    }

    pub fn gradient(&self, q: &QVector) -> Result<GradientResult> {
        let grad_qconj = self.gradient_conjugate(q)?;
        Ok(GradientResult {
            grad_q: grad_qconj.conj(),
            grad_qconj,
        })
    }

    /// First block row of `H_HH*`: `(½R, O, O, O)`.
    pub fn hessian_blocks(&self) -> [QMatrix; 4] {
        let n = self.dim();
        let z = QMatrix::zeros(n, n);
        [self.r.scale(0.5), z.clone(), z.clone(), z]
    }
}

impl ScalarField for QuadraticObjective {
    fn eval(&self, q: &QVector) -> f64 {
        self.evaluate(q)
            .expect("point dimension must match the objective")
    }
}

/// Default finite-difference step `1e-5 · max(1, ‖q‖∞)`.
pub fn default_step(q: &QVector) -> f64 {
    1e-5 * q.max_abs().max(1.0)
}

fn perturbed(q: &QVector, index: usize, comp: usize, delta: f64) -> QVector {
    let mut out = q.clone();
    *out[index].component_mut(comp) += delta;
    out
}

/// Central-difference partials of a vector-valued `f` with respect to the
/// four real components of `q[index]`.
fn partials_vec(
    f: &dyn Fn(&QVector) -> QVector,
    q: &QVector,
    index: usize,
    step: f64,
) -> [QVector; 4] {
    [0, 1, 2, 3].map(|comp| {
        let plus = f(&perturbed(q, index, comp, step));
        let minus = f(&perturbed(q, index, comp, -step));
        (&plus - &minus).scale(0.5 / step)
    })
}

fn combine(partials: [Quaternion; 4], mu: Quaternion, conjugated: bool) -> Result<Quaternion> {
    let units = [Quaternion::I, Quaternion::J, Quaternion::K].map(|u| u.rotate(mu));
    let sign = if conjugated { 1.0 } else { -1.0 };
    let mut acc = partials[0];
    for (p, u) in partials[1..].iter().zip(units) {
        acc += (*p * u?) * sign;
    }
    Ok(acc * 0.25)
}

fn check_numeric_args(q: &QVector, index: usize, mu: Quaternion, step: f64) -> Result<()> {
    if mu.is_zero() {
        return Err(Error::ZeroRotator);
    }
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    if index >= q.len() {
        return Err(shape_err(
            format!("index below {}", q.len()),
            format!("{index}"),
        ));
    }
    Ok(())
}

/// `∂f/∂q_index^μ` (or `∂f/∂q_index^μ*` when `conjugated`) of a real-valued field.
pub fn ghr_derivative_numeric(
    f: &dyn ScalarField,
    q: &QVector,
    index: usize,
    mu: Quaternion,
    conjugated: bool,
    step: f64,
) -> Result<Quaternion> {
    check_numeric_args(q, index, mu, step)?;
    let partials = [0, 1, 2, 3].map(|comp| {
        let plus = f.eval(&perturbed(q, index, comp, step));
        let minus = f.eval(&perturbed(q, index, comp, -step));
        Quaternion::real((plus - minus) / (2.0 * step))
    });
    combine(partials, mu, conjugated)
}

/// Numeric GHR derivative of a quaternion-valued function.
pub fn ghr_derivative_numeric_quat(
    f: &dyn Fn(&QVector) -> Quaternion,
    q: &QVector,
    index: usize,
    mu: Quaternion,
    conjugated: bool,
    step: f64,
) -> Result<Quaternion> {
    check_numeric_args(q, index, mu, step)?;
    let wrapped = |x: &QVector| QVector::new(vec![f(x)]).expect("finite function value");
    let partials = partials_vec(&wrapped, q, index, step).map(|v| v[0]);
    combine(partials, mu, conjugated)
}

/// Numeric GHR Jacobian of a vector-valued function: entry `(s, t)` is
/// `∂f_s/∂q_t^μ` (or `∂f_s/∂q_t^μ*`).
pub fn ghr_jacobian_numeric(
    f: &dyn Fn(&QVector) -> QVector,
    q: &QVector,
    mu: Quaternion,
    conjugated: bool,
    step: f64,
) -> Result<QMatrix> {
    check_numeric_args(q, 0, mu, step)?;
    let m = f(q).len();
    let n = q.len();
    let mut out = QMatrix::zeros(m, n);
    for t in 0..n {
        let [pa, pb, pc, pd] = partials_vec(f, q, t, step);
        for (s, (((a, b), c), d)) in pa
            .iter()
            .zip(pb.iter())
            .zip(pc.iter())
            .zip(pd.iter())
            .enumerate()
        {
            out.set(s, t, combine([*a, *b, *c, *d], mu, conjugated)?);
        }
    }
    Ok(out)
}

/// `∇_{q*} f` (or `∇_q f`) of a real-valued field, entrywise numeric.
pub fn gradient_numeric(
    f: &dyn ScalarField,
    q: &QVector,
    conjugated: bool,
    step: f64,
) -> Result<QVector> {
    let entries = (0..q.len())
        .map(|s| ghr_derivative_numeric(f, q, s, Quaternion::ONE, conjugated, step))
        .collect::<Result<Vec<_>>>()?;
    QVector::new(entries)
}

/// Default step for [`real_hessian_numeric`]: `1e-3 · max(1, ‖q‖∞)`.
pub fn default_hessian_step(q: &QVector) -> f64 {
    1e-3 * q.max_abs().max(1.0)
}

/// Central-difference Hessian of `f` in the real coordinates
/// `q_R = (q_a; q_b; q_c; q_d)`. Exact up to rounding for quadratics.
pub fn real_hessian_numeric(f: &dyn ScalarField, q: &QVector, step: f64) -> Result<DMatrix<f64>> {
    check_numeric_args(q, 0, Quaternion::ONE, step)?;
    let x = to_aug_real(q).0;
    let dim = x.len();
    let eval = |di: usize, si: f64, dj: usize, sj: f64| -> Result<f64> {
        let mut y = x.clone();
        y[di] += si * step;
        y[dj] += sj * step;
        Ok(f.eval(&AugmentedRealVector(y).to_qvector()?))
    };
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = (eval(i, 1.0, j, 1.0)? - eval(i, 1.0, j, -1.0)? - eval(i, -1.0, j, 1.0)?
                + eval(i, -1.0, j, -1.0)?)
                / (4.0 * step * step);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// `∇_{q*} f` given directly.
pub fn gradient_conjugate(obj: &QuadraticObjective, q: &QVector) -> Result<QVector> {
    obj.gradient_conjugate(q)
}

pub fn evaluate(obj: &QuadraticObjective, q: &QVector) -> Result<f64> {
    obj.evaluate(q)
}

pub fn hessian_blocks(obj: &QuadraticObjective) -> [QMatrix; 4] {
    obj.hessian_blocks()
}

/// Closed-form GHR derivatives for four standard forms.
#[derive(Clone, Debug, PartialEq)]
pub enum StandardForm {
    /// `f(q) = aᵀ q β`
    LinearLeft { a: QVector, beta: Quaternion },
    /// `f(q) = α qᴴ b`
    ConjLinear { alpha: Quaternion, b: QVector },
    /// `f(q) = A q β` (vector-valued)
    MatrixLinear { a: QMatrix, beta: Quaternion },
    /// `f(q) = qᴴ A q`
    Quadratic { a: QMatrix },
}

/// Jacobians `∂f/∂q` and `∂f/∂q*`, one row per output component.
#[derive(Clone, Debug, PartialEq)]
pub struct FormDerivative {
    pub d_dq: QMatrix,
    pub d_dqconj: QMatrix,
}

impl FormDerivative {
    /// Column gradients for the scalar-valued forms.
    pub fn gradient(&self) -> Result<GradientResult> {
        if self.d_dq.rows() != 1 {
            return Err(shape_err(
                "scalar-valued form",
                format!("{} outputs", self.d_dq.rows()),
            ));
        }
        Ok(GradientResult {
            grad_q: self.d_dq.row(0),
            grad_qconj: self.d_dqconj.row(0),
        })
    }
}

impl StandardForm {
    pub fn dim(&self) -> usize {
        match self {
            StandardForm::LinearLeft { a, .. } => a.len(),
            StandardForm::ConjLinear { b, .. } => b.len(),
            StandardForm::MatrixLinear { a, .. } => a.cols(),
            StandardForm::Quadratic { a } => a.cols(),
        }
    }

    fn check(&self, q: &QVector) -> Result<()> {
        if let StandardForm::Quadratic { a } = self {
            if !a.is_square() {
                return Err(shape_err("square A", format!("{:?}", a.shape())));
            }
        }
        if q.len() != self.dim() {
            return Err(shape_err(
                format!("point of length {}", self.dim()),
                format!("length {}", q.len()),
            ));
        }
        Ok(())
    }

    /// Function value as a vector (length 1 for the scalar rows).
    pub fn evaluate(&self, q: &QVector) -> Result<QVector> {
        self.check(q)?;
        let v = match self {
            StandardForm::LinearLeft { a, beta } => vec![a.tdot(q)? * *beta],
            StandardForm::ConjLinear { alpha, b } => vec![*alpha * q.hdot(b)?],
            StandardForm::MatrixLinear { a, beta } => return Ok(a.matvec(q)?.mul_right(*beta)),
            StandardForm::Quadratic { a } => vec![q.hdot(&a.matvec(q)?)?],
        };
        QVector::new(v)
    }

    pub fn derivative(&self, q: &QVector) -> Result<FormDerivative> {
        self.check(q)?;
        let row = |v: Vec<Quaternion>| QMatrix::new(1, v.len(), v);
        let (d_dq, d_dqconj) = match self {
            StandardForm::LinearLeft { a, beta } => (
                row(a.iter().map(|&x| x * beta.re()).collect())?,
                row(a.iter().map(|&x| x * beta.conj() * -0.5).collect())?,
            ),
            StandardForm::ConjLinear { alpha, b } => (
                row(b.iter().map(|&x| *alpha * x.conj() * -0.5).collect())?,
                row(b.iter().map(|&x| *alpha * x.re()).collect())?,
            ),
            StandardForm::MatrixLinear { a, beta } => {
                (a.scale(beta.re()), a.map(|x| x * beta.conj() * -0.5))
            }
            StandardForm::Quadratic { a } => {
                // qᴴA as a row, and Aq
                let qha = a.hermitian_transpose().matvec(q)?.conj();
                let aq = a.matvec(q)?;
                let n = q.len();
                (
                    row((0..n).map(|t| qha[t] - aq[t].conj() * 0.5).collect())?,
                    row((0..n)
                        .map(|t| qha[t] * -0.5 + Quaternion::real(aq[t].re()))
                        .collect())?,
                )
            }
        };
        Ok(FormDerivative { d_dq, d_dqconj })
    }
}

pub fn form_derivative(form: &StandardForm, q: &QVector) -> Result<FormDerivative> {
    form.derivative(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Axis;
    use crate::random::{
        random_gram, random_hermitian, random_matrix, random_quaternion, random_vector, seeded,
    };

    fn vec_close(a: &QVector, b: &QVector, tol: f64) -> bool {
        a.distance(b).unwrap() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn squared_norm_conjugate_derivative_is_half_q() {
        let mut rng = seeded(1);
        let q = random_vector(&mut rng, 3);
        let f = QuadraticObjective::squared_norm(3);
        for s in 0..3 {
            let d =
                ghr_derivative_numeric(&f, &q, s, Quaternion::ONE, true, default_step(&q)).unwrap();
            assert!((d - q[s] * 0.5).max_abs() < 1e-9);
        }
    }

    #[test]
    fn constant_field_has_zero_derivative() {
        let q = QVector::from_real(&[1.0, 2.0]).unwrap();
        let f = |_: &QVector| 3.5;
        for conj in [false, true] {
            let d = ghr_derivative_numeric(&f, &q, 1, Quaternion::J, conj, 1e-5).unwrap();
            assert_eq!(d, Quaternion::ZERO);
        }
    }

    #[test]
    fn numeric_derivative_rejects_bad_arguments() {
        let q = QVector::zeros(2);
        let f = |x: &QVector| x.norm_sqr();
        assert_eq!(
            ghr_derivative_numeric(&f, &q, 0, Quaternion::ZERO, true, 1e-5),
            Err(Error::ZeroRotator)
        );
        assert!(ghr_derivative_numeric(&f, &q, 0, Quaternion::ONE, true, 0.0).is_err());
        assert!(ghr_derivative_numeric(&f, &q, 5, Quaternion::ONE, true, 1e-5).is_err());
    }

    #[test]
    fn conj_linear_real_part_matches_closed_form() {
        let mut rng = seeded(2);
        let b = random_vector(&mut rng, 3);
        let q = random_vector(&mut rng, 3);
        let f = |x: &QVector| b.real_inner(x).unwrap();
        let num = gradient_numeric(&f, &q, true, default_step(&q)).unwrap();
        let row2 = StandardForm::ConjLinear {
            alpha: Quaternion::ONE,
            b: b.clone(),
        }
        .derivative(&q)
        .unwrap();
        let row1 = StandardForm::LinearLeft {
            a: b.conj(),
            beta: Quaternion::ONE,
        }
        .derivative(&q)
        .unwrap();
        // Re{qᴴb} = ½(qᴴb + bᴴq) and bᴴq = (b*)ᵀ q · 1
        let analytic = (&row2.d_dqconj.row(0) + &row1.d_dqconj.row(0)).scale(0.5);
        assert!(vec_close(&num, &analytic, 1e-8));
        assert!(vec_close(&num, &b.scale(0.25), 1e-8));
    }

    #[test]
    fn quadratic_gradient_examples() {
        let mut rng = seeded(3);
        let q = random_vector(&mut rng, 4);
        let f = QuadraticObjective::squared_norm(4);
        assert!(vec_close(
            &f.gradient_conjugate(&q).unwrap(),
            &q.scale(0.5),
            1e-15
        ));
        let r = random_gram(&mut rng, 5, 4, 1.0);
        let p = random_vector(&mut rng, 4);
        let obj = QuadraticObjective::new(r.clone(), p.clone(), 0.0).unwrap();
        let stationary = r.solve(&p).unwrap();
        assert!(obj.gradient_conjugate(&stationary).unwrap().norm() < 1e-10);
        assert!(obj.gradient_conjugate(&QVector::zeros(3)).is_err());
    }

    #[test]
    fn quadratic_gradient_matches_numeric() {
        let mut rng = seeded(4);
        for n in 1..=4 {
            let obj = QuadraticObjective::new(
                random_hermitian(&mut rng, n),
                random_vector(&mut rng, n),
                0.3,
            )
            .unwrap();
            let q = random_vector(&mut rng, n);
            let num = gradient_numeric(&obj, &q, true, default_step(&q)).unwrap();
            assert!(vec_close(&obj.gradient_conjugate(&q).unwrap(), &num, 1e-6));
            let num_q = gradient_numeric(&obj, &q, false, default_step(&q)).unwrap();
            assert!(vec_close(&obj.gradient(&q).unwrap().grad_q, &num_q, 1e-6));
        }
    }

    #[test]
    fn least_squares_gradient_is_half_ah_residual() {
        let mut rng = seeded(5);
        let a = random_matrix(&mut rng, 5, 3);
        let b = random_vector(&mut rng, 5);
        let q = random_vector(&mut rng, 3);
        let obj = QuadraticObjective::least_squares(&a, &b).unwrap();
        let resid = a.matvec(&q).unwrap().try_sub(&b).unwrap();
        let expect = a.hermitian_transpose().matvec(&resid).unwrap().scale(0.5);
        assert!(vec_close(
            &obj.gradient_conjugate(&q).unwrap(),
            &expect,
            1e-12
        ));
        assert!(
            (obj.evaluate(&q).unwrap() - resid.norm_sqr()).abs()
                < 1e-10 * resid.norm_sqr().max(1.0)
        );
    }

    #[test]
    fn evaluate_examples() {
        let mut rng = seeded(6);
        let obj = QuadraticObjective::new(
            random_hermitian(&mut rng, 2),
            random_vector(&mut rng, 2),
            1.25,
        )
        .unwrap();
        assert_eq!(obj.evaluate(&QVector::zeros(2)).unwrap(), 1.25);
        let q = random_vector(&mut rng, 2);
        let f = QuadraticObjective::squared_norm(2);
        assert!((f.evaluate(&q).unwrap() - q.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn real_hessian_of_squared_norm_is_twice_identity() {
        let mut rng = seeded(13);
        let q = random_vector(&mut rng, 2);
        let f = QuadraticObjective::squared_norm(2);
        let h = real_hessian_numeric(&f, &q, default_hessian_step(&q)).unwrap();
        let expect = DMatrix::<f64>::identity(8, 8) * 2.0;
        assert!((h - expect).abs().max() < 1e-8);
    }

    #[test]
    fn hessian_blocks_examples() {
        let b = QuadraticObjective::squared_norm(2).hessian_blocks();
        assert_eq!(b[0], QMatrix::scalar_identity(2, Quaternion::real(0.5)));
        for z in &b[1..] {
            assert_eq!(*z, QMatrix::zeros(2, 2));
        }
        let zero = QuadraticObjective::new(QMatrix::zeros(2, 2), QVector::zeros(2), 0.0).unwrap();
        assert!(zero.hessian_blocks().iter().all(|m| m.max_abs() == 0.0));
    }

    #[test]
    fn objective_rejects_non_hermitian() {
        let r = QMatrix::from_rows(vec![vec![Quaternion::I]]).unwrap();
        assert!(matches!(
            QuadraticObjective::new(r, QVector::zeros(1), 0.0),
            Err(Error::NotHermitian(_))
        ));
        let bad: std::result::Result<QuadraticObjective, _> =
            serde_json::from_str(r#"{"R": [[[0,1,0,0]]], "p": [[0,0,0,0]], "c": 0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn objective_json_round_trip() {
        let mut rng = seeded(7);
        let obj = QuadraticObjective::new(
            random_hermitian(&mut rng, 2),
            random_vector(&mut rng, 2),
            2.0,
        )
        .unwrap();
        let s = serde_json::to_string(&obj).unwrap();
        assert!(s.starts_with("{\"R\":"));
        let back: QuadraticObjective = serde_json::from_str(&s).unwrap();
        assert_eq!(back, obj);
    }

    #[test]
    fn standard_form_examples() {
        let q = QVector::zeros(2);
        let e1 = QVector::basis(2, 0);
        let d = StandardForm::LinearLeft {
            a: e1.clone(),
            beta: Quaternion::ONE,
        }
        .derivative(&q)
        .unwrap();
        assert_eq!(d.d_dq.row(0), e1);
        let mut rng = seeded(8);
        let a = random_matrix(&mut rng, 3, 2);
        let d = StandardForm::MatrixLinear {
            a: a.clone(),
            beta: Quaternion::ONE,
        }
        .derivative(&q)
        .unwrap();
        assert!(d.d_dqconj.max_diff(&a.scale(-0.5)).unwrap() < 1e-15);
        assert!(d.gradient().is_err());
    }

    fn check_row_against_numeric(row: &StandardForm, q: &QVector) {
        let f = |x: &QVector| row.evaluate(x).unwrap();
        let analytic = row.derivative(q).unwrap();
        let step = default_step(q);
        let num = ghr_jacobian_numeric(&f, q, Quaternion::ONE, false, step).unwrap();
        let num_c = ghr_jacobian_numeric(&f, q, Quaternion::ONE, true, step).unwrap();
        let scale = analytic.d_dq.max_abs().max(1.0);
        assert!(
            num.max_diff(&analytic.d_dq).unwrap() < 1e-6 * scale,
            "{row:?}"
        );
        assert!(
            num_c.max_diff(&analytic.d_dqconj).unwrap() < 1e-6 * scale,
            "{row:?}"
        );
    }

    #[test]
    fn standard_forms_match_numeric() {
        let mut rng = seeded(9);
        for _ in 0..10 {
            let n = 3;
            let q = random_vector(&mut rng, n);
            let rows = [
                StandardForm::LinearLeft {
                    a: random_vector(&mut rng, n),
                    beta: random_quaternion(&mut rng),
                },
                StandardForm::ConjLinear {
                    alpha: random_quaternion(&mut rng),
                    b: random_vector(&mut rng, n),
                },
                StandardForm::MatrixLinear {
                    a: random_matrix(&mut rng, 2, n),
                    beta: random_quaternion(&mut rng),
                },
                StandardForm::Quadratic {
                    a: random_matrix(&mut rng, n, n),
                },
            ];
            for row in &rows {
                check_row_against_numeric(row, &q);
            }
        }
    }

    #[test]
    fn conjugate_rule_on_real_fields() {
        let mut rng = seeded(10);
        let obj = QuadraticObjective::new(
            random_hermitian(&mut rng, 3),
            random_vector(&mut rng, 3),
            0.0,
        )
        .unwrap();
        let q = random_vector(&mut rng, 3);
        let step = default_step(&q);
        for axis in Axis::ALL {
            for s in 0..3 {
                let d = ghr_derivative_numeric(&obj, &q, s, axis.unit(), false, step).unwrap();
                let dc = ghr_derivative_numeric(&obj, &q, s, axis.unit(), true, step).unwrap();
                assert!((d.conj() - dc).max_abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rotation_rule_on_real_fields() {
        // (∂f/∂q)^ν = ∂f/∂q^ν for real f, including non-unit rotators
        let mut rng = seeded(11);
        let obj = QuadraticObjective::new(
            random_hermitian(&mut rng, 2),
            random_vector(&mut rng, 2),
            0.0,
        )
        .unwrap();
        let q = random_vector(&mut rng, 2);
        let step = default_step(&q);
        for nu in [
            Quaternion::I,
            Quaternion::J,
            Quaternion::K,
            random_quaternion(&mut rng),
        ] {
            let d = ghr_derivative_numeric(&obj, &q, 0, Quaternion::ONE, false, step).unwrap();
            let dn = ghr_derivative_numeric(&obj, &q, 0, nu, false, step).unwrap();
            assert!((d.rotate(nu).unwrap() - dn).max_abs() < 1e-6);
        }
    }

    #[test]
    fn product_rule_on_quaternion_valued_forms() {
        // ∂(fg)/∂q^μ = f ∂g/∂q^μ + ∂f/∂q^{gμ} g
        let mut rng = seeded(12);
        let a = random_matrix(&mut rng, 1, 1);
        let av = random_vector(&mut rng, 1);
        let beta = random_quaternion(&mut rng);
        let fq = StandardForm::Quadratic { a };
        let gq = StandardForm::LinearLeft { a: av, beta };
        let f = |x: &QVector| fq.evaluate(x).unwrap()[0];
        let g = |x: &QVector| gq.evaluate(x).unwrap()[0];
        let fg = |x: &QVector| f(x) * g(x);
        let q = random_vector(&mut rng, 1);
        let step = 1e-5;
        for mu in [Quaternion::ONE, Quaternion::I, random_quaternion(&mut rng)] {
            for conj in [false, true] {
                let lhs = ghr_derivative_numeric_quat(&fg, &q, 0, mu, conj, step).unwrap();
                let gv = g(&q);
                let dg = ghr_derivative_numeric_quat(&g, &q, 0, mu, conj, step).unwrap();
                let df = ghr_derivative_numeric_quat(&f, &q, 0, gv * mu, conj, step).unwrap();
                let rhs = f(&q) * dg + df * gv;
                assert!(
                    (lhs - rhs).max_abs() < 1e-5 * rhs.norm().max(1.0),
                    "mu={mu} conj={conj}"
                );
            }
        }
    }
}
