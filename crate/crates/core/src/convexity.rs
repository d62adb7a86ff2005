//! Convexity and strong-convexity certificates.
//!
//! The second-order tests are exact for quadratic objectives and may certify.
//! The sampled criteria quantify over finitely many pairs, so they can only
//! refute or report `Inconclusive`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::augmented::{
    assemble_aug_hessian, aug_block_diag, aug_real_matrix, j_matrix, to_aug_quat, to_aug_real,
    AugmentedQuaternionVector, AugmentedRealVector,
};
use crate::error::{shape_err, Error, Result};
use crate::ghr::{default_step, gradient_numeric, QuadraticObjective, ScalarField};
use crate::optimize::solve_equality_qp;
use crate::qlinalg::{QMatrix, QVector, SINGULAR_COND};
use crate::quaternion::Quaternion;
use crate::random::{normal, seeded, uniform, QRng};

/// Relative violation tolerance for the sampled criteria.
pub const SAMPLE_TOL: f64 = 1e-8;

/// Tolerance for the gradient consistency pre-check.
pub const GRADIENT_CHECK_TOL: f64 = 1e-5;

const GRADIENT_CHECK_POINTS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Certified => "Certified",
            Verdict::Refuted => "Refuted",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    FirstOrder,
    Monotonicity,
    SecondOrder,
    LineMidpoint,
    StrongSecondOrder,
    StrongFirstOrder,
    StrongMonotonicity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub p: QVector,
    pub q: QVector,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub criterion: Criterion,
    pub witness: Option<Witness>,
    pub sigma: Option<f64>,
}

impl Certificate {
    fn new(verdict: Verdict, criterion: Criterion) -> Self {
        Certificate {
            verdict,
            criterion,
            witness: None,
            sigma: None,
        }
    }

    fn refuted(criterion: Criterion, witness: Witness) -> Self {
        Certificate {
            verdict: Verdict::Refuted,
            criterion,
            witness: Some(witness),
            sigma: None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn is_refuted(&self) -> bool {
        self.verdict == Verdict::Refuted
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// All of ℍⁿ, sampled with i.i.d. normal components of standard deviation `scale`.
    Whole { n: usize, scale: f64 },
    /// Componentwise bounds on the four real parts of every entry.
    Box { lo: QVector, hi: QVector },
}

/// Deterministic pair sampler over a convex region. Candidate pairs are
/// examined before the random ones.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledDomain {
    pub region: Region,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    candidates: Vec<(QVector, QVector)>,
}

impl SampledDomain {
    pub fn whole(n: usize, scale: f64, samples: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sampling scale must be positive, got {scale}"
            )));
        }
        Ok(SampledDomain {
            region: Region::Whole { n, scale },
            samples,
            seed,
            tol: SAMPLE_TOL,
            candidates: Vec::new(),
        })
    }

    pub fn boxed(lo: QVector, hi: QVector, samples: usize, seed: u64) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(shape_err(
                format!("upper bound of length {}", lo.len()),
                format!("length {}", hi.len()),
            ));
        }
        for (l, h) in lo.iter().zip(hi.iter()) {
            for c in 0..4 {
                if l.component(c) > h.component(c) {
                    return Err(Error::InvalidArgument(
                        "box lower bound exceeds upper bound".into(),
                    ));
                }
            }
        }
        Ok(SampledDomain {
            region: Region::Box { lo, hi },
            samples,
            seed,
            tol: SAMPLE_TOL,
            candidates: Vec::new(),
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        match &self.region {
            Region::Whole { n, .. } => *n,
            Region::Box { lo, .. } => lo.len(),
        }
    }

    pub fn contains(&self, q: &QVector) -> bool {
        match &self.region {
            Region::Whole { n, .. } => q.len() == *n,
            Region::Box { lo, hi } => box_contains(lo, hi, q, 0.0),
        }
    }

    pub fn add_candidate(&mut self, p: QVector, q: QVector) -> Result<()> {
        if p.len() != self.dim() || q.len() != self.dim() {
            return Err(shape_err(
                format!("points of length {}", self.dim()),
                format!("{} and {}", p.len(), q.len()),
            ));
        }
        self.candidates.push((p, q));
        Ok(())
    }

    pub fn candidates(&self) -> &[(QVector, QVector)] {
        &self.candidates
    }

    /// Adds pairs along the eigenvector of `R` with the smallest eigenvalue,
    /// both orders, scaled to stay inside the region.
    pub fn inject_eigen_witness(&mut self, obj: &QuadraticObjective) -> Result<()> {
        let (_, x) = obj.r().min_eigenpair()?;
        let (center, reach) = match &self.region {
            Region::Whole { n, scale } => (QVector::zeros(*n), *scale),
            Region::Box { lo, hi } => {
                let center = lo.try_add(hi)?.scale(0.5);
                let half = hi.try_sub(lo)?.scale(0.5);
                let min_half = half
                    .iter()
                    .flat_map(|h| h.to_array())
                    .fold(f64::INFINITY, f64::min);
                (center, min_half / x.max_abs().max(f64::MIN_POSITIVE))
            }
        };
        let end = center.try_add(&x.scale(reach))?;
        self.add_candidate(end.clone(), center.clone())?;
        self.add_candidate(center, end)
    }

    pub fn sample_point(&self, rng: &mut QRng) -> QVector {
        match &self.region {
            Region::Whole { n, scale } => {
                let v = (0..*n)
                    .map(|_| {
                        Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng)) * *scale
                    })
                    .collect();
                QVector::new(v).expect("positive length")
            }
            Region::Box { lo, hi } => {
                let v = lo
                    .iter()
                    .zip(hi.iter())
                    .map(|(l, h)| {
                        let mut q = Quaternion::ZERO;
                        for c in 0..4 {
                            *q.component_mut(c) = uniform(rng, l.component(c), h.component(c));
                        }
                        q
                    })
                    .collect();
                QVector::new(v).expect("positive length")
            }
        }
    }

    /// Candidate pairs followed by `samples` random pairs, in a fixed order.
    pub fn pairs(&self) -> Vec<(QVector, QVector)> {
        let mut rng = seeded(self.seed);
        let mut out = self.candidates.clone();
        for _ in 0..self.samples {
            let p = self.sample_point(&mut rng);
            let q = self.sample_point(&mut rng);
            out.push((p, q));
        }
        out
    }

    fn check_points(&self) -> Vec<QVector> {
        let mut rng = seeded(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        (0..GRADIENT_CHECK_POINTS)
            .map(|_| self.sample_point(&mut rng))
            .collect()
    }
}

fn box_contains(lo: &QVector, hi: &QVector, q: &QVector, slack: f64) -> bool {
    q.len() == lo.len()
        && q.iter().zip(lo.iter().zip(hi.iter())).all(|(x, (l, h))| {
            (0..4).all(|c| {
                x.component(c) >= l.component(c) - slack && x.component(c) <= h.component(c) + slack
            })
        })
}

/// Compares `grad` with the numeric conjugate gradient of `f` on a few
/// domain points.
pub fn validate_gradient(
    f: &dyn ScalarField,
    grad: &dyn Fn(&QVector) -> QVector,
    dom: &SampledDomain,
) -> Result<()> {
    for q in dom.check_points() {
        let g = grad(&q);
        let num = gradient_numeric(f, &q, true, default_step(&q))?;
        let err = g.distance(&num)?;
        if err > GRADIENT_CHECK_TOL * g.norm().max(1.0) {
            return Err(Error::GradientMismatch(err));
        }
    }
    Ok(())
}

/// Scans the pairs and returns the first whose `(violation, scale)` exceeds
/// `dom.tol · scale`.
fn scan(
    dom: &SampledDomain,
    test: impl Fn(&QVector, &QVector) -> Result<(f64, f64)>,
) -> Result<Option<Witness>> {
    for (p, q) in dom.pairs() {
        let (violation, scale) = test(&p, &q)?;
        if violation > dom.tol * scale {
            return Ok(Some(Witness { p, q, violation }));
        }
    }
    Ok(None)
}

fn sampled_certificate(
    criterion: Criterion,
    witness: Option<Witness>,
    sigma: Option<f64>,
) -> Certificate {
    let mut cert = match witness {
        Some(w) => Certificate::refuted(criterion, w),
        None => Certificate::new(Verdict::Inconclusive, criterion),
    };
    cert.sigma = sigma;
    cert
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(())
}

fn first_order_gap(
    f: &dyn ScalarField,
    grad: &dyn Fn(&QVector) -> QVector,
    p: &QVector,
    q: &QVector,
    sigma: f64,
) -> Result<(f64, f64)> {
    let fp = f.eval(p);
    let fq = f.eval(q);
    let d = q.try_sub(p)?;
    let rhs = fp + 4.0 * grad(p).real_inner(&d)? + 0.5 * sigma * d.norm_sqr();
    Ok((rhs - fq, 1.0 + fp.abs() + fq.abs()))
}

fn monotonicity_gap(
    grad: &dyn Fn(&QVector) -> QVector,
    p: &QVector,
    q: &QVector,
    sigma: f64,
) -> Result<(f64, f64)> {
    let d = p.try_sub(q)?;
    let dg = grad(p).try_sub(&grad(q))?;
    let lhs = dg.real_inner(&d)?;
    let rhs = 0.25 * sigma * d.norm_sqr();
    Ok((rhs - lhs, 1.0 + dg.norm() * d.norm() + rhs))
}

/// Samples `f(q) ≥ f(p) + 4 Re{∇_{p*}f(p)ᴴ(q − p)}`.
pub fn check_first_order(
    f: &dyn ScalarField,
    grad: &dyn Fn(&QVector) -> QVector,
    dom: &SampledDomain,
) -> Result<Certificate> {
    validate_gradient(f, grad, dom)?;
    let w = scan(dom, |p, q| first_order_gap(f, grad, p, q, 0.0))?;
    Ok(sampled_certificate(Criterion::FirstOrder, w, None))
}

/// Samples `Re{(∇_{p*}f(p) − ∇_{q*}f(q))ᴴ(p − q)} ≥ 0`. `f` is used only for
/// the gradient consistency pre-check.
pub fn check_monotonicity(
    f: &dyn ScalarField,
    grad: &dyn Fn(&QVector) -> QVector,
    dom: &SampledDomain,
) -> Result<Certificate> {
    validate_gradient(f, grad, dom)?;
    let w = scan(dom, |p, q| monotonicity_gap(grad, p, q, 0.0))?;
    Ok(sampled_certificate(Criterion::Monotonicity, w, None))
}

/// Samples `f(q) ≥ f(p) + 4 Re{∇_{p*}f(p)ᴴ(q − p)} + σ/2 ‖q − p‖²`.
pub fn check_strong_first_order(
    f: &dyn ScalarField,
    grad: &dyn Fn(&QVector) -> QVector,
    dom: &SampledDomain,
    sigma: f64,
) -> Result<Certificate> {
    check_sigma(sigma)?;
    validate_gradient(f, grad, dom)?;
    let w = scan(dom, |p, q| first_order_gap(f, grad, p, q, sigma))?;
    Ok(sampled_certificate(
        Criterion::StrongFirstOrder,
        w,
        Some(sigma),
    ))
}

/// Samples `Re{(∇_{p*}f(p) − ∇_{q*}f(q))ᴴ(p − q)} ≥ σ/4 ‖p − q‖²`.
pub fn check_strong_monotonicity(
    f: &dyn ScalarField,
    grad: &dyn Fn(&QVector) -> QVector,
    dom: &SampledDomain,
    sigma: f64,
) -> Result<Certificate> {
    check_sigma(sigma)?;
    validate_gradient(f, grad, dom)?;
    let w = scan(dom, |p, q| monotonicity_gap(grad, p, q, sigma))?;
    Ok(sampled_certificate(
        Criterion::StrongMonotonicity,
        w,
        Some(sigma),
    ))
}

/// Minimum eigenvalue of the augmented Hessian `H_HH*` and its tolerance.
fn aug_hessian_min(obj: &QuadraticObjective) -> Result<(f64, f64)> {
    let h = assemble_aug_hessian(&obj.hessian_blocks())?;
    let m = h.matrix();
    Ok((m.min_eigenvalue()?, m.default_psd_tol()?))
}

/// Witness pair `(x, 0)` along the lowest eigenvector of `R`.
fn eigen_witness(obj: &QuadraticObjective, violation: f64) -> Result<Witness> {
    let (_, x) = obj.r().min_eigenpair()?;
    Ok(Witness {
        q: QVector::zeros(x.len()),
        p: x,
        violation,
    })
}

/// Exact PSD test of `H_HH*`. Carries the strong-convexity estimate in `sigma`.
pub fn check_second_order_quadratic(obj: &QuadraticObjective) -> Result<Certificate> {
    let (lmin, tol) = aug_hessian_min(obj)?;
    let mut cert = if lmin >= -tol {
        Certificate::new(Verdict::Certified, Criterion::SecondOrder)
    } else {
        Certificate::refuted(Criterion::SecondOrder, eigen_witness(obj, -lmin)?)
    };
    cert.sigma = Some(4.0 * lmin.max(0.0));
    Ok(cert)
}

/// Necessary condition `H_{qq*} = ½R ⪰ O`.
pub fn check_necessary_block(obj: &QuadraticObjective) -> Result<bool> {
    let half = obj.r().scale(0.5);
    let tol = half.default_psd_tol()?;
    half.is_psd(tol)
}

/// `4 · max(λ_min(H_HH*), 0)`.
pub fn estimate_sigma(obj: &QuadraticObjective) -> Result<f64> {
    Ok(4.0 * aug_hessian_min(obj)?.0.max(0.0))
}

/// Certified iff `λ_min(H_HH*) ≥ σ/4 − tol`.
pub fn check_strong_convexity(obj: &QuadraticObjective, sigma: f64) -> Result<Certificate> {
    check_sigma(sigma)?;
    let (lmin, tol) = aug_hessian_min(obj)?;
    let gap = 0.25 * sigma - lmin;
    let mut cert = if gap <= tol {
        Certificate::new(Verdict::Certified, Criterion::StrongSecondOrder)
    } else {
        Certificate::refuted(Criterion::StrongSecondOrder, eigen_witness(obj, gap)?)
    };
    cert.sigma = Some(sigma);
    Ok(cert)
}

/// `g(t) = f(q + t v)`.
pub struct LineRestriction<'a> {
    f: &'a dyn ScalarField,
    q: QVector,
    v: QVector,
}

impl LineRestriction<'_> {
    pub fn eval(&self, t: f64) -> f64 {
        let x = self
            .q
            .try_add(&self.v.scale(t))
            .expect("line restriction shapes checked at construction");
        self.f.eval(&x)
    }

    /// `g((s+t)/2) − (g(s) + g(t))/2`; positive values violate convexity.
    pub fn midpoint_violation(&self, s: f64, t: f64) -> f64 {
        self.eval(0.5 * (s + t)) - 0.5 * (self.eval(s) + self.eval(t))
    }
}

pub fn restrict_to_line<'a>(
    f: &'a dyn ScalarField,
    q: &QVector,
    v: &QVector,
) -> Result<LineRestriction<'a>> {
    if q.len() != v.len() {
        return Err(shape_err(
            format!("direction of length {}", q.len()),
            format!("length {}", v.len()),
        ));
    }
    if v.max_abs() == 0.0 {
        return Err(Error::ZeroDirection);
    }
    Ok(LineRestriction {
        f,
        q: q.clone(),
        v: v.clone(),
    })
}

/// Midpoint convexity along the segment of every sampled pair at random
/// parameter pairs in `[0, 1]`.
pub fn check_line_midpoint(f: &dyn ScalarField, dom: &SampledDomain) -> Result<Certificate> {
    let mut rng = seeded(dom.seed.wrapping_add(1));
    for (p, q) in dom.pairs() {
        let v = q.try_sub(&p)?;
        if v.max_abs() == 0.0 {
            continue;
        }
        let g = restrict_to_line(f, &p, &v)?;
        let (s, t) = (uniform(&mut rng, 0.0, 1.0), uniform(&mut rng, 0.0, 1.0));
        let violation = g.midpoint_violation(s, t);
        let scale = 1.0 + g.eval(s).abs() + g.eval(t).abs();
        if violation > dom.tol * scale {
            let ps = p.try_add(&v.scale(s))?;
            let pt = p.try_add(&v.scale(t))?;
            return Ok(Certificate::refuted(
                Criterion::LineMidpoint,
                Witness {
                    p: ps,
                    q: pt,
                    violation,
                },
            ));
        }
    }
    Ok(Certificate::new(
        Verdict::Inconclusive,
        Criterion::LineMidpoint,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetEquivalenceReport {
    pub trials: usize,
    pub inside: usize,
    pub disagreements: usize,
    /// Largest gap between the three decoded convex combinations.
    pub max_mismatch: f64,
}

/// Forms convex combinations of sampled points in ℍⁿ, in the augmented real
/// space and in the augmented quaternion space, and checks that box
/// membership of the decoded points agrees. Points are drawn from the box
/// enlarged by half its width so both outcomes occur.
pub fn set_equivalence_probe(
    lo: &QVector,
    hi: &QVector,
    trials: usize,
    seed: u64,
) -> Result<SetEquivalenceReport> {
    let half = hi.try_sub(lo)?.scale(0.5);
    let wide = SampledDomain::boxed(lo.try_sub(&half)?, hi.try_add(&half)?, 0, seed)?;
    let mut rng = seeded(seed);
    let slack = 1e-12 * (1.0 + lo.max_abs().max(hi.max_abs()));
    let mut report = SetEquivalenceReport {
        trials,
        inside: 0,
        disagreements: 0,
        max_mismatch: 0.0,
    };
    for _ in 0..trials {
        let p = wide.sample_point(&mut rng);
        let q = wide.sample_point(&mut rng);
        let lam = uniform(&mut rng, 0.0, 1.0);
        let z = p.scale(lam).try_add(&q.scale(1.0 - lam))?;
        let zr = AugmentedRealVector(to_aug_real(&p).0 * lam + to_aug_real(&q).0 * (1.0 - lam))
            .to_qvector()?;
        let hp = to_aug_quat(&p).0;
        let hq = to_aug_quat(&q).0;
        let zh = hp.scale(lam).try_add(&hq.scale(1.0 - lam))?;
        let zh = AugmentedQuaternionVector(zh);
        let mismatch = z
            .distance(&zr)?
            .max(z.distance(&zh.to_qvector())?)
            .max(zh.structure_deviation());
        report.max_mismatch = report.max_mismatch.max(mismatch);
        let m = [&z, &zr, &zh.to_qvector()].map(|x| box_contains(lo, hi, x, slack));
        let clear = [&z, &zr, &zh.to_qvector()].map(|x| box_contains(lo, hi, x, -slack));
        if m[0] {
            report.inside += 1;
        }
        // only count points that are not within rounding of the boundary
        let boundary = m.iter().zip(clear.iter()).any(|(a, b)| a != b);
        if !boundary && (m[0] != m[1] || m[0] != m[2]) {
            report.disagreements += 1;
        }
    }
    Ok(report)
}

/// Optima of one equality-constrained quadratic program in its three
/// equivalent formulations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub q_quaternion: QVector,
    pub q_aug_quaternion: QVector,
    pub q_aug_real: QVector,
    pub objective_quaternion: f64,
    pub objective_aug_quaternion: f64,
    pub objective_aug_real: f64,
    /// Largest deviation of the augmented-quaternion optimum from involution structure.
    pub structure_deviation: f64,
    /// `‖J x_R − h‖∞` between the augmented-real and augmented-quaternion optima.
    pub j_map_error: f64,
    pub max_mismatch: f64,
}

/// Solves `min f(q)` s.t. `Aq = b` as a quaternion program, as an augmented
/// quaternion program over ℍ⁴ⁿ with block-diagonal data, and as a real KKT
/// system over ℝ⁴ⁿ; the three optima are compared after mapping through `J`.
pub fn equivalence_demo(
    obj: &QuadraticObjective,
    a: Option<&QMatrix>,
    b: Option<&QVector>,
) -> Result<EquivalenceReport> {
    let n = obj.dim();
    let q1 = solve_equality_qp(obj, a, b)?;

    // ¼ h_Hᴴ R_H h_H − ½ Re{p_Hᴴ h_H} is f(q) with p, R replaced by their
    // augmented forms; the factor ¼ cancels in the stationarity condition
    let rh = aug_block_diag(obj.r());
    let ph = to_aug_quat(obj.p()).0;
    let aug_obj = QuadraticObjective::new(rh, ph, 4.0 * obj.c())?;
    let ah = a.map(aug_block_diag);
    let bh = b.map(|b| to_aug_quat(b).0);
    let h = solve_equality_qp(&aug_obj, ah.as_ref(), bh.as_ref())?;
    let h = AugmentedQuaternionVector(h);
    let q2 = h.to_qvector();

    // real program: x_Rᵀ M x_R − 2 p_Rᵀ x_R + c with M = ¼ Jᴴ R_H J
    let m = aug_real_matrix(obj.r())?;
    let pr = to_aug_real(obj.p()).0;
    let (ar, br) = match (a, b) {
        (Some(a), Some(b)) => (Some(aug_real_matrix(a)?), Some(to_aug_real(b).0)),
        _ => (None, None),
    };
    let x = solve_real_kkt(&m, &pr, ar.as_ref(), br.as_ref())?;
    let xr = AugmentedRealVector(x);
    let q3 = xr.to_qvector()?;
    let j = j_matrix(n)?;
    let jx = j.apply_real(&xr)?;
    let j_map_error = jx.0.try_sub(&h.0)?.max_abs();

    let obj_real = {
        let x = &xr.0;
        (x.transpose() * &m * x)[(0, 0)] - 2.0 * pr.dot(x) + obj.c()
    };
    let report = EquivalenceReport {
        objective_quaternion: obj.evaluate(&q1)?,
        objective_aug_quaternion: 0.25 * aug_obj.evaluate(&h.0)?,
        objective_aug_real: obj_real,
        structure_deviation: h.structure_deviation(),
        j_map_error,
        max_mismatch: q1.distance(&q2)?.max(q1.distance(&q3)?).max(j_map_error),
        q_quaternion: q1,
        q_aug_quaternion: q2,
        q_aug_real: q3,
    };
    Ok(report)
}

/// `[2M Aᵀ; A 0] [x; ν] = [2p; b]`.
fn solve_real_kkt(
    m: &DMatrix<f64>,
    p: &DVector<f64>,
    a: Option<&DMatrix<f64>>,
    b: Option<&DVector<f64>>,
) -> Result<DVector<f64>> {
    let n = m.nrows();
    let k = a.map_or(0, |a| a.nrows());
    let mut kkt = DMatrix::<f64>::zeros(n + k, n + k);
    let mut rhs = DVector::<f64>::zeros(n + k);
    kkt.view_mut((0, 0), (n, n)).copy_from(&(m * 2.0));
    rhs.rows_mut(0, n).copy_from(&(p * 2.0));
    if let (Some(a), Some(b)) = (a, b) {
        kkt.view_mut((n, 0), (k, n)).copy_from(a);
        kkt.view_mut((0, n), (n, k)).copy_from(&a.transpose());
        rhs.rows_mut(n, k).copy_from(b);
    }
    let sv = kkt.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if smin <= smax / SINGULAR_COND {
        return Err(Error::Singular(if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        }));
    }
    let sol = kkt.lu().solve(&rhs).ok_or(Error::Singular(f64::INFINITY))?;
    Ok(sol.rows(0, n).into_owned())
}
