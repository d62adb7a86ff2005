//! The identity and verification suite behind `qcvx verify`.
//!
//! Checks are grouped into numbered criteria. Every check reports a single
//! worst-case violation which passes when it is at most the pinned tolerance.
//! Verdict-style checks count wrong outcomes against a tolerance of zero.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use qcvx_core::augmented::{
    assemble_aug_hessian, aug_conj_gradient, aug_gradient_from_real, aug_hessian_from_real,
    aug_inner, j_matrix, real_gradient_from_aug, real_hessian_bridge, to_aug_quat, to_aug_real,
    AugmentedRealVector,
};
use qcvx_core::convexity::{
    check_first_order, check_monotonicity, check_necessary_block, check_second_order_quadratic,
    check_strong_convexity, equivalence_demo, estimate_sigma, set_equivalence_probe, SampledDomain,
    Verdict, SAMPLE_TOL,
};
use qcvx_core::ghr::{
    default_hessian_step, default_step, ghr_derivative_numeric, ghr_jacobian_numeric,
    gradient_numeric, real_hessian_numeric, QuadraticObjective, StandardForm,
};
use qcvx_core::optimize::{
    affine_projection, gradient_descent, local_global_probe, mvdr_beamform, projected_gradient,
    projection_from_multiplier, projection_multiplier, wiener_solve, ConstrainedQP, DescentOptions,
};
use qcvx_core::random::{
    normal, random_gram, random_hermitian, random_matrix, random_quaternion, random_vector, seeded,
    uniform, QRng,
};
use qcvx_core::{qmul, Axis, QMatrix, QVector, Quaternion, Result};

pub const IDENTITY_TOL: f64 = 1e-9;
pub const DERIVATIVE_TOL: f64 = 1e-6;
pub const HESSIAN_FD_TOL: f64 = 1e-5;
pub const STATIONARITY_TOL: f64 = 1e-8;
pub const DESCENT_TOL: f64 = 1e-6;
pub const SPREAD_TOL: f64 = 1e-5;
pub const FEASIBILITY_TOL: f64 = 1e-10;
pub const KKT_TOL: f64 = 1e-9;
pub const MVDR_CONSTRAINT_TOL: f64 = 1e-12;
pub const DOMINANCE_SLACK: f64 = 1e-9;
pub const RECAST_TOL: f64 = 1e-5;
pub const EQUIVALENCE_TOL: f64 = 1e-6;
pub const SIGMA_TOL: f64 = 1e-9;
/// Sampled pairs for the certificate and feasibility checks.
pub const PAIR_SAMPLES: usize = 1000;

pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub criterion: u8,
    pub status: Status,
    pub max_violation: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall-clock time, recorded only on request so reports stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub samples: usize,
    pub status: Status,
    pub checks: Vec<CheckResult>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random instances per identity.
    pub samples: usize,
    /// Relative violation tolerance for the sampled certificate criteria.
    pub sample_tol: f64,
    pub timing: bool,
}

impl VerifyConfig {
    pub fn new(seed: u64, samples: usize) -> Self {
        VerifyConfig {
            seed,
            samples,
            sample_tol: SAMPLE_TOL,
            timing: false,
        }
    }
}

type CheckFn = fn(&mut QRng, &VerifyConfig) -> Result<f64>;

struct Check {
    name: &'static str,
    criterion: u8,
    tolerance: f64,
    run: CheckFn,
}

const fn check(name: &'static str, criterion: u8, tolerance: f64, run: CheckFn) -> Check {
    Check {
        name,
        criterion,
        tolerance,
        run,
    }
}

const CHECKS: &[Check] = &[
    check("j_gram", 1, IDENTITY_TOL, j_gram),
    check("j_transport", 1, IDENTITY_TOL, j_transport),
    check(
        "augmented_inner_products",
        1,
        IDENTITY_TOL,
        augmented_inner_products,
    ),
    check("rotation_identities", 1, IDENTITY_TOL, rotation_identities),
    check("gradient_transport", 1, IDENTITY_TOL, gradient_transport),
    check(
        "augmented_hessian_form",
        1,
        IDENTITY_TOL,
        augmented_hessian_form,
    ),
    check(
        "conjugate_gradient_vs_numeric",
        2,
        DERIVATIVE_TOL,
        conjugate_gradient_vs_numeric,
    ),
    check(
        "standard_forms_vs_numeric",
        2,
        DERIVATIVE_TOL,
        standard_forms_vs_numeric,
    ),
    check(
        "least_squares_gradient",
        2,
        DERIVATIVE_TOL,
        least_squares_gradient,
    ),
    check("conjugate_rule", 2, IDENTITY_TOL, conjugate_rule),
    check("rotation_rule", 2, DERIVATIVE_TOL, rotation_rule),
    check(
        "hessian_bridge_vs_finite_difference",
        3,
        HESSIAN_FD_TOL,
        hessian_bridge_vs_fd,
    ),
    check("hessian_round_trip", 3, IDENTITY_TOL, hessian_round_trip),
    check("certify_least_squares", 4, 0.0, certify_least_squares),
    check("refute_indefinite", 4, 0.0, refute_indefinite),
    check("principal_submatrices", 4, 0.0, principal_submatrices),
    check("sigma_squared_norm", 5, SIGMA_TOL, sigma_squared_norm),
    check("sigma_threshold", 5, 0.0, sigma_threshold),
    check("sigma_scaled_identity", 5, SIGMA_TOL, sigma_scaled_identity),
    check(
        "wiener_stationarity",
        6,
        STATIONARITY_TOL,
        wiener_stationarity,
    ),
    check(
        "descent_reaches_wiener",
        6,
        DESCENT_TOL,
        descent_reaches_wiener,
    ),
    check("local_global_spread", 6, SPREAD_TOL, local_global_spread),
    check(
        "projection_feasibility",
        7,
        FEASIBILITY_TOL,
        projection_feasibility,
    ),
    check(
        "projection_minimality",
        7,
        FEASIBILITY_TOL,
        projection_minimality,
    ),
    check("projection_multiplier", 7, KKT_TOL, projection_kkt),
    check("mvdr_constraint", 8, MVDR_CONSTRAINT_TOL, mvdr_constraint),
    check("mvdr_dominance", 8, DOMINANCE_SLACK, mvdr_dominance),
    check("mvdr_recast", 8, RECAST_TOL, mvdr_recast),
    check(
        "formulation_equivalence",
        9,
        EQUIVALENCE_TOL,
        formulation_equivalence,
    ),
    check("set_equivalence", 9, 0.0, set_equivalence),
];

/// Criteria covered by the suite, in order.
pub fn criteria() -> Vec<u8> {
    let mut c: Vec<u8> = CHECKS.iter().map(|c| c.criterion).collect();
    c.dedup();
    c
}

fn run_check(index: usize, c: &Check, cfg: &VerifyConfig) -> CheckResult {
    // one stream per check, all derived from the single suite seed
    let mut rng = seeded(cfg.seed ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let start = Instant::now();
    let outcome = (c.run)(&mut rng, cfg);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let (max_violation, error) = match outcome {
        Ok(v) if v.is_finite() => (v, None),
        Ok(v) => (f64::MAX, Some(format!("non-finite violation {v}"))),
        Err(e) => (f64::MAX, Some(e.to_string())),
    };
    let status = if error.is_none() && max_violation <= c.tolerance {
        Status::Pass
    } else {
        Status::Fail
    };
    CheckResult {
        name: c.name.to_string(),
        criterion: c.criterion,
        status,
        max_violation,
        tolerance: c.tolerance,
        error,
        elapsed_ms: cfg.timing.then_some(elapsed),
    }
}

/// Runs the checks of the given criteria, or all of them for `None`.
pub fn run_suite(cfg: &VerifyConfig, only: Option<&[u8]>) -> RunReport {
    let checks: Vec<CheckResult> = CHECKS
        .iter()
        .enumerate()
        .filter(|(_, c)| only.is_none_or(|o| o.contains(&c.criterion)))
        .map(|(i, c)| run_check(i, c, cfg))
        .collect();
    let status = if checks.iter().all(|c| c.status == Status::Pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    RunReport {
        seed: cfg.seed,
        samples: cfg.samples,
        status,
        checks,
    }
}

fn rel(err: f64, scale: f64) -> f64 {
    err / (1.0 + scale)
}

fn random_objective(rng: &mut QRng, n: usize) -> QuadraticObjective {
    QuadraticObjective::new(random_hermitian(rng, n), random_vector(rng, n), normal(rng))
        .expect("Hermitian by construction")
}

fn pd_objective(rng: &mut QRng, n: usize) -> QuadraticObjective {
    QuadraticObjective::new(random_gram(rng, n + 2, n, 0.5), random_vector(rng, n), 0.0)
        .expect("Hermitian by construction")
}

fn nonzero_quaternion(rng: &mut QRng) -> Quaternion {
    loop {
        let q = random_quaternion(rng);
        if q.norm() > 1e-2 {
            return q;
        }
    }
}

fn j_gram(_: &mut QRng, _: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        let j = j_matrix(n)?;
        let g = j.matrix().hermitian_transpose().matmul(j.matrix())?;
        worst = worst.max(g.max_diff(&QMatrix::identity(4 * n).scale(4.0))?);
    }
    Ok(worst)
}

fn j_transport(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let j = j_matrix(3)?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let q = random_vector(rng, 3);
        let qh = to_aug_quat(&q);
        let err_h = j.apply_real(&to_aug_real(&q))?.0.try_sub(&qh.0)?.max_abs();
        let err_r = (j.to_real(&qh.0)?.0 - to_aug_real(&q).0).amax();
        worst = worst.max(rel(err_h.max(err_r), q.max_abs()));
    }
    Ok(worst)
}

fn augmented_inner_products(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let p = random_vector(rng, 3);
        let q = random_vector(rng, 3);
        worst = worst.max(rel(aug_inner(&p, &q)?.max_violation(), p.norm() * q.norm()));
    }
    Ok(worst)
}

fn rotation_identities(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let (p, q) = (random_quaternion(rng), random_quaternion(rng));
        let (mu, nu) = (nonzero_quaternion(rng), nonzero_quaternion(rng));
        let scale = 1.0 + p.norm() * q.norm();
        let errs = [
            (qmul(p, q).rotate(mu)? - qmul(p.rotate(mu)?, q.rotate(mu)?)).max_abs() / scale,
            (q.rotate(nu)?.rotate(mu)? - q.rotate(qmul(mu, nu))?).max_abs() / (1.0 + q.norm()),
            (q.rotate(mu)?.conj() - q.conj().rotate(mu)?).max_abs() / (1.0 + q.norm()),
            (qmul(p, q).norm() - p.norm() * q.norm()).abs() / scale,
            ((q + q.involution(Axis::I) + q.involution(Axis::J) + q.involution(Axis::K)) * 0.25
                - Quaternion::real(q.a))
            .max_abs()
                / (1.0 + q.norm()),
        ];
        worst = errs.into_iter().fold(worst, f64::max);
    }
    Ok(worst)
}

fn gradient_transport(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let n = 3;
    let j = j_matrix(n)?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let obj = random_objective(rng, n);
        let q = random_vector(rng, n);
        let y = random_vector(rng, n);
        let g = obj.gradient(&q)?;
        // the real gradient collects the four real partials, each 4× a component of ∇_{q*}
        let grad_r = to_aug_real(&g.grad_qconj).0 * 4.0;
        let grad_h = aug_conj_gradient(&g.grad_qconj);
        let scale = grad_r.amax() * (1.0 + y.max_abs());
        let via_aug = real_gradient_from_aug(&j, &grad_h)?;
        let via_real = aug_gradient_from_real(&j, &AugmentedRealVector(grad_r.clone()))?;
        let pairing = grad_r.dot(&to_aug_real(&y).0) - 4.0 * g.grad_qconj.real_inner(&y)?;
        let nr = grad_r.norm();
        let errs = [
            (via_aug.0 - &grad_r).amax(),
            via_real.0.try_sub(&grad_h.0)?.max_abs(),
            pairing.abs(),
            (nr - 2.0 * to_aug_quat(&g.grad_q).0.norm()).abs(),
            (nr - 4.0 * g.grad_q.norm()).abs(),
        ];
        worst = errs
            .into_iter()
            .map(|e| rel(e, scale))
            .fold(worst, f64::max);
    }
    Ok(worst)
}

fn random_symmetric(rng: &mut QRng, dim: usize) -> DMatrix<f64> {
    let b = DMatrix::from_fn(dim, dim, |_, _| normal(rng));
    (&b + b.transpose()) * 0.5
}

fn augmented_hessian_form(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let n = 2;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let hrr = random_symmetric(rng, 4 * n);
        let h = aug_hessian_from_real(&hrr)?;
        let x = random_vector(rng, n);
        let xh = to_aug_quat(&x).0;
        let lhs = h.matrix().real_bilinear(&xh, &xh)?;
        let mut rhs = 0.0;
        for nu in Axis::ALL {
            rhs += 4.0
                * h.block(Axis::One, nu)
                    .real_bilinear(&x, &x.involution(nu))?;
        }
        let xr = to_aug_real(&x).0;
        let real_form = (xr.transpose() * &hrr * &xr)[(0, 0)];
        worst = worst.max(rel(
            (lhs - rhs).abs().max((lhs - real_form).abs()),
            lhs.abs(),
        ));
    }
    Ok(worst)
}

fn rel_vec(a: &QVector, b: &QVector) -> Result<f64> {
    Ok(a.distance(b)? / b.norm().max(1.0))
}

fn conjugate_gradient_vs_numeric(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in 0..cfg.samples {
        let n = 1 + t % 4;
        let obj = random_objective(rng, n);
        let q = random_vector(rng, n);
        let num = gradient_numeric(&obj, &q, true, default_step(&q))?;
        worst = worst.max(rel_vec(&obj.gradient_conjugate(&q)?, &num)?);
    }
    Ok(worst)
}

fn standard_forms_vs_numeric(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let n = 3;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let q = random_vector(rng, n);
        let rows = [
            StandardForm::LinearLeft {
                a: random_vector(rng, n),
                beta: random_quaternion(rng),
            },
            StandardForm::ConjLinear {
                alpha: random_quaternion(rng),
                b: random_vector(rng, n),
            },
            StandardForm::MatrixLinear {
                a: random_matrix(rng, 2, n),
                beta: random_quaternion(rng),
            },
            StandardForm::Quadratic {
                a: random_matrix(rng, n, n),
            },
        ];
        let step = default_step(&q);
        for row in &rows {
            let f = |x: &QVector| row.evaluate(x).expect("shape fixed above");
            let d = row.derivative(&q)?;
            let scale = d.d_dq.max_abs().max(d.d_dqconj.max_abs()).max(1.0);
            let e1 =
                ghr_jacobian_numeric(&f, &q, Quaternion::ONE, false, step)?.max_diff(&d.d_dq)?;
            let e2 =
                ghr_jacobian_numeric(&f, &q, Quaternion::ONE, true, step)?.max_diff(&d.d_dqconj)?;
            worst = worst.max(e1.max(e2) / scale);
        }
    }
    Ok(worst)
}

fn least_squares_gradient(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let a = random_matrix(rng, 4, 3);
        let b = random_vector(rng, 4);
        let q = random_vector(rng, 3);
        let expect = a
            .hermitian_transpose()
            .matvec(&a.matvec(&q)?.try_sub(&b)?)?
            .scale(0.5);
        let f = |x: &QVector| {
            a.matvec(x)
                .and_then(|ax| ax.try_sub(&b))
                .map(|r| r.norm_sqr())
                .unwrap_or(f64::NAN)
        };
        let num = gradient_numeric(&f, &q, true, default_step(&q))?;
        let obj = QuadraticObjective::least_squares(&a, &b)?;
        worst = worst
            .max(rel_vec(&num, &expect)?)
            .max(rel_vec(&obj.gradient_conjugate(&q)?, &expect)?);
    }
    Ok(worst)
}

fn conjugate_rule(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let obj = random_objective(rng, 2);
        let q = random_vector(rng, 2);
        let step = default_step(&q);
        for axis in Axis::ALL {
            let d = ghr_derivative_numeric(&obj, &q, 0, axis.unit(), false, step)?;
            let dc = ghr_derivative_numeric(&obj, &q, 0, axis.unit(), true, step)?;
            worst = worst.max(rel((d.conj() - dc).max_abs(), d.norm()));
        }
    }
    Ok(worst)
}

fn rotation_rule(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let obj = random_objective(rng, 2);
        let q = random_vector(rng, 2);
        let nu = nonzero_quaternion(rng);
        let step = default_step(&q);
        let base = ghr_derivative_numeric(&obj, &q, 1, Quaternion::ONE, false, step)?;
        let rotated = ghr_derivative_numeric(&obj, &q, 1, nu, false, step)?;
        worst = worst.max(rel((base.rotate(nu)? - rotated).max_abs(), base.norm()));
    }
    Ok(worst)
}

fn hessian_bridge_vs_fd(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in 0..(cfg.samples / 5).max(5) {
        let n = 2 + t % 2;
        let obj = random_objective(rng, n);
        let q = random_vector(rng, n);
        let hrr = real_hessian_bridge(&assemble_aug_hessian(&obj.hessian_blocks())?)?;
        let fd = real_hessian_numeric(&obj, &q, default_hessian_step(&q))?;
        worst = worst.max((hrr - fd).amax());
    }
    Ok(worst)
}

fn hessian_round_trip(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples {
        let hrr = random_symmetric(rng, 8);
        let h = aug_hessian_from_real(&hrr)?;
        let reassembled = assemble_aug_hessian(&h.first_row())?;
        let back = real_hessian_bridge(&reassembled)?;
        worst = worst.max(rel((back - &hrr).amax(), hrr.amax()));
        worst = worst.max(reassembled.matrix().max_diff(h.matrix())?);
    }
    Ok(worst)
}

fn indefinite_objective(rng: &mut QRng, n: usize) -> Result<QuadraticObjective> {
    // shift a random Hermitian matrix so its smallest eigenvalue is −½
    let h = random_hermitian(rng, n);
    let lmin = h.min_eigenvalue()?;
    let r = h.try_sub(&QMatrix::identity(n).scale(lmin + 0.5))?;
    let r = r.try_add(&r.hermitian_transpose())?.scale(0.5);
    QuadraticObjective::new(r, random_vector(rng, n), 0.0)
}

fn wrong(flag: bool) -> f64 {
    if flag {
        1.0
    } else {
        0.0
    }
}

fn certify_least_squares(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut wrong_verdicts = 0.0;
    for (m, n) in [(3, 3), (5, 3), (4, 2), (6, 4), (2, 2)] {
        let a = random_matrix(rng, m, n);
        let b = random_vector(rng, m);
        let obj = QuadraticObjective::least_squares(&a, &b)?;
        let grad = |q: &QVector| obj.gradient_conjugate(q).expect("dimension fixed");
        let dom =
            SampledDomain::whole(n, 3.0, PAIR_SAMPLES, rng.next_seed())?.with_tol(cfg.sample_tol);
        wrong_verdicts += wrong(!check_second_order_quadratic(&obj)?.is_certified());
        wrong_verdicts += wrong(!check_necessary_block(&obj)?);
        wrong_verdicts +=
            wrong(check_first_order(&obj, &grad, &dom)?.verdict != Verdict::Inconclusive);
        wrong_verdicts +=
            wrong(check_monotonicity(&obj, &grad, &dom)?.verdict != Verdict::Inconclusive);
    }
    Ok(wrong_verdicts)
}

fn refute_indefinite(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut wrong_verdicts = 0.0;
    for n in [1, 2, 3, 4, 5] {
        let obj = indefinite_objective(rng, n)?;
        let grad = |q: &QVector| obj.gradient_conjugate(q).expect("dimension fixed");
        let cert = check_second_order_quadratic(&obj)?;
        wrong_verdicts += wrong(!cert.is_refuted());
        // the witness pair must violate gradient monotonicity when re-evaluated
        match &cert.witness {
            Some(w) => {
                let d = w.p.try_sub(&w.q)?;
                let dg = grad(&w.p).try_sub(&grad(&w.q))?;
                wrong_verdicts += wrong(dg.real_inner(&d)? >= 0.0 || w.violation <= 0.0);
            }
            None => wrong_verdicts += 1.0,
        }
        let mut dom =
            SampledDomain::whole(n, 1.0, PAIR_SAMPLES, rng.next_seed())?.with_tol(cfg.sample_tol);
        dom.inject_eigen_witness(&obj)?;
        let mono = check_monotonicity(&obj, &grad, &dom)?;
        wrong_verdicts += wrong(!mono.is_refuted() || mono.witness.is_none());
        let first = check_first_order(&obj, &grad, &dom)?;
        wrong_verdicts += wrong(!first.is_refuted() || first.witness.is_none());
    }
    Ok(wrong_verdicts)
}

fn principal_submatrices(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut wrong_verdicts = 0.0;
    for _ in 0..cfg.samples {
        let m = random_gram(rng, 2, 4, 0.0);
        let idx: Vec<usize> = (0..4).filter(|_| uniform(rng, 0.0, 1.0) < 0.5).collect();
        if idx.is_empty() {
            continue;
        }
        let sub = m.principal_submatrix(&idx);
        wrong_verdicts += wrong(!sub.is_psd(sub.default_psd_tol()?)?);
    }
    Ok(wrong_verdicts)
}

fn sigma_squared_norm(_: &mut QRng, _: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 1..=5 {
        worst = worst.max((estimate_sigma(&QuadraticObjective::squared_norm(n))? - 2.0).abs());
    }
    Ok(worst)
}

fn sigma_threshold(_: &mut QRng, _: &VerifyConfig) -> Result<f64> {
    let obj = QuadraticObjective::squared_norm(3);
    let mut wrong_verdicts = wrong(!check_strong_convexity(&obj, 2.0)?.is_certified());
    wrong_verdicts += wrong(!check_strong_convexity(&obj, 1.0)?.is_certified());
    wrong_verdicts += wrong(!check_strong_convexity(&obj, 2.001)?.is_refuted());
    Ok(wrong_verdicts)
}

fn sigma_scaled_identity(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.samples.min(20) {
        let lam = uniform(rng, 0.0, 10.0);
        let obj = QuadraticObjective::new(QMatrix::identity(3).scale(lam), QVector::zeros(3), 0.0)?;
        worst = worst.max((estimate_sigma(&obj)? - 2.0 * lam).abs());
    }
    Ok(worst)
}

fn wiener_stationarity(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in 0..cfg.samples {
        let obj = pd_objective(rng, 1 + t % 6);
        let w = wiener_solve(obj.r(), obj.p())?.q_opt;
        let resid = obj.r().matvec(&w)?.try_sub(obj.p())?.scale(0.5).norm();
        worst = worst.max(resid / (1.0 + obj.p().norm()));
    }
    Ok(worst)
}

fn descent_reaches_wiener(rng: &mut QRng, _: &VerifyConfig) -> Result<f64> {
    let obj = pd_objective(rng, 4);
    let w = wiener_solve(obj.r(), obj.p())?.q_opt;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let q0 = random_vector(rng, 4).scale(3.0);
        let res = gradient_descent(&obj, &q0, &DescentOptions::default())?;
        worst = worst.max(res.q_opt.distance(&w)?);
    }
    Ok(worst)
}

fn local_global_spread(rng: &mut QRng, _: &VerifyConfig) -> Result<f64> {
    let obj = pd_objective(rng, 4);
    let a = random_matrix(rng, 2, 4);
    let b = random_vector(rng, 2);
    let free = local_global_probe(
        &ConstrainedQP::unconstrained(obj.clone()),
        10,
        rng.next_seed(),
        &DescentOptions::default(),
    )?;
    let prob = ConstrainedQP::new(obj, Some(a), Some(b))?;
    let constrained = local_global_probe(&prob, 10, rng.next_seed(), &DescentOptions::default())?;
    Ok([
        free.max_pairwise_distance,
        free.max_objective_spread,
        constrained.max_pairwise_distance,
        constrained.max_objective_spread,
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

struct ProjectionCase {
    a: QMatrix,
    b: QVector,
    y: QVector,
}

fn projection_case(rng: &mut QRng, t: usize) -> ProjectionCase {
    let n = 3 + t % 4;
    let p = 1 + t % (n - 1);
    ProjectionCase {
        a: random_matrix(rng, p, n),
        b: random_vector(rng, p),
        y: random_vector(rng, n),
    }
}

fn projection_feasibility(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in 0..cfg.samples {
        let c = projection_case(rng, t);
        let x = affine_projection(&c.a, &c.b, &c.y)?.q_opt;
        worst = worst.max(c.a.matvec(&x)?.try_sub(&c.b)?.norm() / (1.0 + c.b.norm()));
    }
    Ok(worst)
}

fn projection_minimality(rng: &mut QRng, _: &VerifyConfig) -> Result<f64> {
    let c = projection_case(rng, 5);
    let x = affine_projection(&c.a, &c.b, &c.y)?.q_opt;
    let best = x.distance(&c.y)?;
    let mut worst: f64 = 0.0;
    for _ in 0..PAIR_SAMPLES {
        // feasible points from projecting random points onto the same set
        let z = affine_projection(&c.a, &c.b, &random_vector(rng, c.y.len()).scale(5.0))?.q_opt;
        worst = worst.max(best - z.distance(&c.y)?);
    }
    Ok(worst.max(0.0))
}

fn projection_kkt(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in 0..cfg.samples {
        let c = projection_case(rng, t);
        let x = affine_projection(&c.a, &c.b, &c.y)?.q_opt;
        let lambda = projection_multiplier(&c.a, &c.b, &c.y)?;
        let xr = projection_from_multiplier(&c.a, &c.y, &lambda)?;
        worst = worst.max(xr.distance(&x)? / (1.0 + x.norm()));
    }
    Ok(worst)
}

fn mvdr_case(rng: &mut QRng, n: usize) -> (QMatrix, QVector) {
    (random_gram(rng, 2 * n, n, 0.5), random_vector(rng, n))
}

fn mvdr_constraint(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in 0..cfg.samples {
        let (r, a) = mvdr_case(rng, 1 + t % 6);
        let w = mvdr_beamform(&r, &a)?.q_opt;
        worst = worst.max((w.hdot(&a)? - Quaternion::ONE).norm());
    }
    Ok(worst)
}

fn mvdr_dominance(rng: &mut QRng, _: &VerifyConfig) -> Result<f64> {
    let n = 4;
    let (r, a) = mvdr_case(rng, n);
    let res = mvdr_beamform(&r, &a)?;
    let row = QMatrix::new(1, n, a.conj().into_vec())?;
    let one = QVector::basis(1, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..PAIR_SAMPLES {
        let w = affine_projection(&row, &one, &random_vector(rng, n).scale(3.0))?.q_opt;
        worst = worst.max(res.objective_value - r.real_bilinear(&w, &w)?);
    }
    Ok(worst.max(0.0))
}

fn mvdr_recast(rng: &mut QRng, _: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4] {
        let (r, a) = mvdr_case(rng, n);
        let closed = mvdr_beamform(&r, &a)?.q_opt;
        let obj = QuadraticObjective::new(r, QVector::zeros(n), 0.0)?;
        let row = QMatrix::new(1, n, a.conj().into_vec())?;
        let prob = ConstrainedQP::new(obj, Some(row), Some(QVector::basis(1, 0)))?;
        let iter = projected_gradient(&prob, &QVector::zeros(n), &DescentOptions::default())?;
        worst = worst.max(iter.q_opt.distance(&closed)?);
    }
    Ok(worst)
}

fn formulation_equivalence(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in 0..cfg.samples.min(30) {
        let n = 2 + t % 3;
        let obj = pd_objective(rng, n);
        let rep = if t % 3 == 0 {
            equivalence_demo(&obj, None, None)?
        } else {
            let p = 1 + t % (n - 1);
            let a = random_matrix(rng, p, n);
            let b = random_vector(rng, p);
            let rep = equivalence_demo(&obj, Some(&a), Some(&b))?;
            worst = worst.max(a.matvec(&rep.q_aug_real)?.try_sub(&b)?.norm());
            rep
        };
        let scale = 1.0 + rep.objective_quaternion.abs();
        worst = worst
            .max(rep.max_mismatch)
            .max(rep.structure_deviation)
            .max((rep.objective_quaternion - rep.objective_aug_real).abs() / scale)
            .max((rep.objective_quaternion - rep.objective_aug_quaternion).abs() / scale);
    }
    Ok(worst)
}

fn set_equivalence(rng: &mut QRng, cfg: &VerifyConfig) -> Result<f64> {
    let mut disagreements = 0.0;
    for _ in 0..5 {
        let c = random_vector(rng, 3);
        let w = random_vector(rng, 3)
            .map(|q| Quaternion::new(q.a.abs(), q.b.abs(), q.c.abs(), q.d.abs()));
        let rep = set_equivalence_probe(
            &c.try_sub(&w)?,
            &c.try_add(&w)?,
            cfg.samples.max(100),
            rng.next_seed(),
        )?;
        disagreements += rep.disagreements as f64;
        if rep.max_mismatch > IDENTITY_TOL {
            disagreements += 1.0;
        }
    }
    Ok(disagreements)
}

trait NextSeed {
    fn next_seed(&mut self) -> u64;
}

impl NextSeed for QRng {
    fn next_seed(&mut self) -> u64 {
        // draws from the check's own stream; the bit pattern of a uniform in [0, 2^53)
        uniform(self, 0.0, 9_007_199_254_740_992.0) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_criterion_from_one_to_nine_has_checks() {
        assert_eq!(criteria(), (1..=9).collect::<Vec<u8>>());
    }

    #[test]
    fn small_suite_passes_and_is_reproducible() {
        let cfg = VerifyConfig::new(3, 10);
        let a = run_suite(&cfg, Some(&[1, 5]));
        let b = run_suite(&cfg, Some(&[1, 5]));
        assert!(a.passed(), "{a:#?}");
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(a.checks.iter().all(|c| c.elapsed_ms.is_none()));
    }

    #[test]
    fn timing_is_opt_in() {
        let cfg = VerifyConfig {
            timing: true,
            ..VerifyConfig::new(0, 2)
        };
        let rep = run_suite(&cfg, Some(&[5]));
        assert!(rep.checks.iter().all(|c| c.elapsed_ms.is_some()));
    }
}
