//! Closed-form solvers for the three quadratic applications, plus
//! conjugate-gradient descent and its projected variant.
//!
//! Descent iterates `q ← q − η ∇_{q*} f(q)`. Since `∇_{q*} f = ½(Rq − p)`,
//! the default step `η = 1/λ_max(R)` contracts every eigen-direction by a
//! factor in `[½, 1)`.

use serde::{Deserialize, Serialize};

use crate::convexity::check_second_order_quadratic;
use crate::error::{shape_err, Error, Result};
use crate::ghr::QuadraticObjective;
use crate::qlinalg::{QMatrix, QVector, HERMITIAN_TOL};
use crate::quaternion::Quaternion;
use crate::random::{random_vector, seeded};

/// Objective increases tolerated in a row before descent gives up.
pub const DIVERGENCE_PATIENCE: usize = 10;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200_000;

/// `min f(q)` subject to `Aq = b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstrainedQP {
    pub objective: QuadraticObjective,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<QMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<QVector>,
}

#[derive(Deserialize)]
struct RawQP {
    objective: QuadraticObjective,
    #[serde(rename = "A", default)]
    a: Option<QMatrix>,
    #[serde(default)]
    b: Option<QVector>,
}

impl<'de> Deserialize<'de> for ConstrainedQP {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawQP::deserialize(d)?;
        ConstrainedQP::new(raw.objective, raw.a, raw.b).map_err(serde::de::Error::custom)
    }
}

impl ConstrainedQP {
    pub fn new(
        objective: QuadraticObjective,
        a: Option<QMatrix>,
        b: Option<QVector>,
    ) -> Result<Self> {
        match (&a, &b) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                check_constraints(a, b)?;
                if a.cols() != objective.dim() {
                    return Err(shape_err(
                        format!("A with {} columns", objective.dim()),
                        format!("{:?}", a.shape()),
                    ));
                }
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "A and b must be given together".into(),
                ))
            }
        }
        Ok(ConstrainedQP { objective, a, b })
    }

    pub fn unconstrained(objective: QuadraticObjective) -> Self {
        ConstrainedQP {
            objective,
            a: None,
            b: None,
        }
    }

    pub fn constraints(&self) -> Option<(&QMatrix, &QVector)> {
        self.a.as_ref().zip(self.b.as_ref())
    }
}

/// Shapes plus full row rank with `rows ≤ cols`.
fn check_constraints(a: &QMatrix, b: &QVector) -> Result<()> {
    if b.len() != a.rows() {
        return Err(shape_err(
            format!("b of length {}", a.rows()),
            format!("length {}", b.len()),
        ));
    }
    let rank = a.rank();
    if rank != a.rows() || a.rows() > a.cols() {
        return Err(Error::RankDeficient {
            rank,
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖A q − b‖`, present whenever the problem has constraints.
    pub constraint: Option<f64>,
    /// Norm of the (projected) conjugate gradient of the Lagrangian.
    pub gradient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub q_opt: QVector,
    pub objective_value: f64,
    pub iterations: usize,
    pub residuals: Residuals,
    /// Objective value at every iterate, starting with the initial point.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<f64>,
}

fn require_pd(r: &QMatrix) -> Result<()> {
    if !r.is_square() {
        return Err(shape_err("square matrix", format!("{:?}", r.shape())));
    }
    let dev = r.hermitian_deviation();
    if dev > HERMITIAN_TOL * r.max_abs().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let tol = r.default_psd_tol()?;
    if !r.is_pd(tol)? {
        return Err(Error::NotPD(r.min_eigenvalue()?));
    }
    Ok(())
}

/// Solves `R X = B` column by column.
fn solve_columns(r: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
    let cols = (0..b.cols())
        .map(|c| r.solve(&b.col(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(QMatrix::from_fn(b.rows(), b.cols(), |i, j| cols[j][i]))
}

fn constraint_residual(a: &QMatrix, b: &QVector, q: &QVector) -> Result<f64> {
    Ok(a.matvec(q)?.try_sub(b)?.norm())
}

/// `I − Aᴴ(AAᴴ)⁻¹A` applied to `v`: the component of `v` in the null space of `A`.
fn null_component(a: &QMatrix, v: &QVector) -> Result<QVector> {
    let g = a.matmul(&a.hermitian_transpose())?;
    let coef = g.solve(&a.matvec(v)?)?;
    v.try_sub(&a.hermitian_transpose().matvec(&coef)?)
}

/// `w̄ = R⁻¹p`.
pub fn wiener_solve(r: &QMatrix, p: &QVector) -> Result<SolveResult> {
    require_pd(r)?;
    let obj = QuadraticObjective::new(r.clone(), p.clone(), 0.0)?;
    let q = r.solve(p)?;
    Ok(SolveResult {
        objective_value: obj.evaluate(&q)?,
        residuals: Residuals {
            constraint: None,
            gradient: obj.gradient_conjugate(&q)?.norm(),
        },
        q_opt: q,
        iterations: 0,
        history: Vec::new(),
    })
}

/// `x̄ = y + Aᴴ(AAᴴ)⁻¹(b − Ay)`, the point of `{Aq = b}` closest to `y`.
pub fn affine_projection(a: &QMatrix, b: &QVector, y: &QVector) -> Result<SolveResult> {
    check_constraints(a, b)?;
    if y.len() != a.cols() {
        return Err(shape_err(
            format!("y of length {}", a.cols()),
            format!("length {}", y.len()),
        ));
    }
    let ah = a.hermitian_transpose();
    let g = a.matmul(&ah)?;
    let gap = b.try_sub(&a.matvec(y)?)?;
    let x = y.try_add(&ah.matvec(&g.solve(&gap)?)?)?;
    let d = x.try_sub(y)?;
    Ok(SolveResult {
        objective_value: d.norm_sqr(),
        residuals: Residuals {
            constraint: Some(constraint_residual(a, b, &x)?),
            gradient: null_component(a, &d)?.norm(),
        },
        q_opt: x,
        iterations: 0,
        history: Vec::new(),
    })
}

/// Multiplier `λ = 2(AAᴴ)⁻¹(Ay − b)` of the projection Lagrangian.
pub fn projection_multiplier(a: &QMatrix, b: &QVector, y: &QVector) -> Result<QVector> {
    check_constraints(a, b)?;
    let g = a.matmul(&a.hermitian_transpose())?;
    Ok(g.solve(&a.matvec(y)?.try_sub(b)?)?.scale(2.0))
}

/// `x = y − ½Aᴴλ`.
pub fn projection_from_multiplier(a: &QMatrix, y: &QVector, lambda: &QVector) -> Result<QVector> {
    y.try_sub(&a.hermitian_transpose().matvec(lambda)?.scale(0.5))
}

/// `aᴴR⁻¹a` as a real number, with `R⁻¹a`.
fn steering_gain(r: &QMatrix, a: &QVector) -> Result<(f64, QVector)> {
    if a.len() != r.rows() {
        return Err(shape_err(
            format!("steering vector of length {}", r.rows()),
            format!("length {}", a.len()),
        ));
    }
    if a.max_abs() == 0.0 {
        return Err(Error::ZeroSteering);
    }
    require_pd(r)?;
    let u = r.solve(a)?;
    let s = a.hdot(&u)?;
    if s.re().is_nan() || s.re() <= 0.0 || s.im().norm() > 1e-8 * s.norm() {
        return Err(Error::NotPD(s.re()));
    }
    Ok((s.re(), u))
}

/// Multiplier `λ = 1/(aᴴR⁻¹a)`.
pub fn mvdr_multiplier(r: &QMatrix, a: &QVector) -> Result<f64> {
    Ok(1.0 / steering_gain(r, a)?.0)
}

/// `w̄ = R⁻¹a / (aᴴR⁻¹a)`.
pub fn mvdr_beamform(r: &QMatrix, a: &QVector) -> Result<SolveResult> {
    let (s, u) = steering_gain(r, a)?;
    let w = u.scale(1.0 / s);
    let lambda = 1.0 / s;
    let rw = r.matvec(&w)?;
    let stationarity = rw.try_sub(&a.scale(lambda))?.scale(0.5).norm();
    let gain = w.hdot(a)?;
    Ok(SolveResult {
        objective_value: r.real_bilinear(&w, &w)?,
        residuals: Residuals {
            constraint: Some((gain - Quaternion::ONE).norm()),
            gradient: stationarity,
        },
        q_opt: w,
        iterations: 0,
        history: Vec::new(),
    })
}

/// Closed-form optimum of `min f(q)` s.t. `Aq = b` for positive definite `R`:
/// `q = R⁻¹p + R⁻¹Aᴴ(AR⁻¹Aᴴ)⁻¹(b − AR⁻¹p)`.
pub fn solve_equality_qp(
    obj: &QuadraticObjective,
    a: Option<&QMatrix>,
    b: Option<&QVector>,
) -> Result<QVector> {
    let r = obj.r();
    require_pd(r)?;
    let u = r.solve(obj.p())?;
    match (a, b) {
        (None, None) => Ok(u),
        (Some(a), Some(b)) => {
            check_constraints(a, b)?;
            let v = solve_columns(r, &a.hermitian_transpose())?;
            let s = a.matmul(&v)?;
            let nu = s.solve(&b.try_sub(&a.matvec(&u)?)?)?;
            u.try_add(&v.matvec(&nu)?)
        }
        _ => Err(Error::InvalidArgument(
            "A and b must be given together".into(),
        )),
    }
}

/// `1/λ_max(R)`, or 1 when `R = O`.
pub fn safe_step(obj: &QuadraticObjective) -> Result<f64> {
    let eig = obj.r().eigenvalues_hermitian()?;
    let lmax = eig.iter().copied().fold(0.0, f64::max);
    Ok(if lmax > 0.0 { 1.0 / lmax } else { 1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescentOptions {
    /// `None` selects [`safe_step`].
    pub step: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            step: None,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

fn prepare(obj: &QuadraticObjective, q0: &QVector, opts: &DescentOptions) -> Result<f64> {
    if q0.len() != obj.dim() {
        return Err(shape_err(
            format!("start of length {}", obj.dim()),
            format!("length {}", q0.len()),
        ));
    }
    if !check_second_order_quadratic(obj)?.is_certified() {
        return Err(Error::NotCertifiedConvex);
    }
    let step = match opts.step {
        Some(s) => s,
        None => safe_step(obj)?,
    };
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    if opts.tol.is_nan() || opts.tol < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be non-negative, got {}",
            opts.tol
        )));
    }
    Ok(step)
}

struct DivergenceGuard {
    last: f64,
    rises: usize,
}

impl DivergenceGuard {
    fn new(f0: f64) -> Self {
        DivergenceGuard { last: f0, rises: 0 }
    }

    fn observe(&mut self, f: f64, iter: usize) -> Result<()> {
        if !f.is_finite() {
            return Err(Error::Diverged(iter));
        }
        if f > self.last + 1e-12 * (1.0 + self.last.abs()) {
            self.rises += 1;
            if self.rises >= DIVERGENCE_PATIENCE {
                return Err(Error::Diverged(iter));
            }
        } else {
            self.rises = 0;
        }
        self.last = f;
        Ok(())
    }
}

/// Unconstrained descent. Refuses objectives that fail the second-order check.
pub fn gradient_descent(
    obj: &QuadraticObjective,
    q0: &QVector,
    opts: &DescentOptions,
) -> Result<SolveResult> {
    let step = prepare(obj, q0, opts)?;
    let mut q = q0.clone();
    let mut f = obj.evaluate(&q)?;
    let mut history = vec![f];
    let mut guard = DivergenceGuard::new(f);
    let mut iterations = 0;
    let mut g = obj.gradient_conjugate(&q)?;
    while g.norm() > opts.tol && iterations < opts.max_iter {
        q = q.try_sub(&g.scale(step))?;
        iterations += 1;
        f = obj.evaluate(&q)?;
        history.push(f);
        guard.observe(f, iterations)?;
        g = obj.gradient_conjugate(&q)?;
    }
    Ok(SolveResult {
        q_opt: q,
        objective_value: f,
        iterations,
        residuals: Residuals {
            constraint: None,
            gradient: g.norm(),
        },
        history,
    })
}

/// Descent step followed by projection onto `{Aq = b}`, repeated. Stops when
/// the null-space component of the gradient falls below `tol`.
pub fn projected_gradient(
    prob: &ConstrainedQP,
    q0: &QVector,
    opts: &DescentOptions,
) -> Result<SolveResult> {
    let (a, b) = prob.constraints().ok_or_else(|| {
        Error::InvalidArgument("projected gradient needs equality constraints".into())
    })?;
    let obj = &prob.objective;
    let step = prepare(obj, q0, opts)?;
    let mut q = affine_projection(a, b, q0)?.q_opt;
    let mut f = obj.evaluate(&q)?;
    let mut history = vec![f];
    let mut guard = DivergenceGuard::new(f);
    let mut iterations = 0;
    let mut pg = null_component(a, &obj.gradient_conjugate(&q)?)?;
    while pg.norm() > opts.tol && iterations < opts.max_iter {
        let trial = q.try_sub(&obj.gradient_conjugate(&q)?.scale(step))?;
        q = affine_projection(a, b, &trial)?.q_opt;
        iterations += 1;
        f = obj.evaluate(&q)?;
        history.push(f);
        guard.observe(f, iterations)?;
        pg = null_component(a, &obj.gradient_conjugate(&q)?)?;
    }
    Ok(SolveResult {
        objective_value: f,
        iterations,
        residuals: Residuals {
            constraint: Some(constraint_residual(a, b, &q)?),
            gradient: pg.norm(),
        },
        q_opt: q,
        history,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub starts: usize,
    pub limit_points: Vec<QVector>,
    pub objective_values: Vec<f64>,
    pub max_pairwise_distance: f64,
    pub max_objective_spread: f64,
    pub max_iterations: usize,
}

/// Runs the iterative solver from `n_starts` seeded random points and
/// measures how far the limits disagree.
pub fn local_global_probe(
    prob: &ConstrainedQP,
    n_starts: usize,
    seed: u64,
    opts: &DescentOptions,
) -> Result<ProbeReport> {
    if n_starts == 0 {
        return Err(Error::InvalidArgument("need at least one start".into()));
    }
    let mut rng = seeded(seed);
    let n = prob.objective.dim();
    let mut limit_points = Vec::with_capacity(n_starts);
    let mut objective_values = Vec::with_capacity(n_starts);
    let mut max_iterations = 0;
    for _ in 0..n_starts {
        let q0 = random_vector(&mut rng, n).scale(3.0);
        let res = match prob.constraints() {
            Some(_) => projected_gradient(prob, &q0, opts)?,
            None => gradient_descent(&prob.objective, &q0, opts)?,
        };
        max_iterations = max_iterations.max(res.iterations);
        objective_values.push(res.objective_value);
        limit_points.push(res.q_opt);
    }
    let mut max_pairwise_distance: f64 = 0.0;
    for i in 0..limit_points.len() {
        for j in i + 1..limit_points.len() {
            max_pairwise_distance =
                max_pairwise_distance.max(limit_points[i].distance(&limit_points[j])?);
        }
    }
    let hi = objective_values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let lo = objective_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(ProbeReport {
        starts: n_starts,
        limit_points,
        objective_values,
        max_pairwise_distance,
        max_objective_spread: hi - lo,
        max_iterations,
    })
}
