//! Subcommand bodies. Each returns a serializable report; `main` handles
//! output and exit codes.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qcvx_core::convexity::{
    check_first_order, check_monotonicity, check_second_order_quadratic, estimate_sigma,
    Certificate, SampledDomain,
};
use qcvx_core::ghr::QuadraticObjective;
use qcvx_core::optimize::{
    affine_projection, gradient_descent, mvdr_beamform, projected_gradient, wiener_solve,
    ConstrainedQP, DescentOptions, SolveResult, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use qcvx_core::{QMatrix, QVector};

use crate::error::{CliError, CliResult};
use crate::verify::{run_suite, RunReport, VerifyConfig};

/// Radius of the sampling box used by `check --sample`.
pub const SAMPLE_SCALE: f64 = 3.0;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Failure(format!("serialize: {e}")))
}

pub fn cmd_verify(cfg: &VerifyConfig, only: Option<&[u8]>) -> CliResult<RunReport> {
    if cfg.samples == 0 {
        return Err(CliError::Input("samples must be positive".into()));
    }
    if cfg.sample_tol.is_nan() || cfg.sample_tol < 0.0 {
        return Err(CliError::Input(format!(
            "tol must be non-negative, got {}",
            cfg.sample_tol
        )));
    }
    if let Some(bad) = only.and_then(|o| o.iter().find(|c| !(1..=9).contains(*c))) {
        return Err(CliError::Input(format!(
            "no criterion {bad}; the suite covers 1 to 9"
        )));
    }
    Ok(run_suite(cfg, only))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledReport {
    pub first_order: Certificate,
    pub monotonicity: Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub certificate: Certificate,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampled: Option<SampledReport>,
}

impl CheckReport {
    pub fn refuted(&self) -> bool {
        self.certificate.is_refuted()
            || self
                .sampled
                .as_ref()
                .is_some_and(|s| s.first_order.is_refuted() || s.monotonicity.is_refuted())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

pub fn cmd_check(path: &Path, sample: Option<SampleOptions>) -> CliResult<CheckReport> {
    let obj: QuadraticObjective = read_json(path)?;
    check_objective(&obj, sample)
}

pub fn check_objective(
    obj: &QuadraticObjective,
    sample: Option<SampleOptions>,
) -> CliResult<CheckReport> {
    let certificate = check_second_order_quadratic(obj)?;
    let sigma = estimate_sigma(obj)?;
    let sampled = match sample {
        None => None,
        Some(o) => {
            if o.samples == 0 {
                return Err(CliError::Input("samples must be positive".into()));
            }
            let mut dom =
                SampledDomain::whole(obj.dim(), SAMPLE_SCALE, o.samples, o.seed)?.with_tol(o.tol);
            dom.inject_eigen_witness(obj)?;
            let grad = |q: &QVector| {
                obj.gradient_conjugate(q)
                    .expect("dimension checked by the domain")
            };
            Some(SampledReport {
                first_order: check_first_order(obj, &grad, &dom)?,
                monotonicity: check_monotonicity(obj, &grad, &dom)?,
            })
        }
    };
    Ok(CheckReport {
        certificate,
        sigma,
        sampled,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolveKind {
    /// {"R","p","c"?}
    Wiener,
    /// {"A","b","y"}
    Projection,
    /// {"R","a"}
    Mvdr,
    /// {"R","p","c"?,"A"?,"b"?,"q0"?,"step"?,"tol"?,"max_iter"?} or with "objective" in place of R, p, c
    Descent,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionFile {
    #[serde(rename = "A")]
    pub a: QMatrix,
    pub b: QVector,
    pub y: QVector,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MvdrFile {
    #[serde(rename = "R")]
    pub r: QMatrix,
    pub a: QVector,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentFile {
    #[serde(default)]
    pub objective: Option<QuadraticObjective>,
    #[serde(rename = "R", default)]
    pub r: Option<QMatrix>,
    #[serde(default)]
    pub p: Option<QVector>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(rename = "A", default)]
    pub a: Option<QMatrix>,
    #[serde(default)]
    pub b: Option<QVector>,
    #[serde(default)]
    pub q0: Option<QVector>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
}

impl DescentFile {
    pub fn problem(self) -> CliResult<(ConstrainedQP, QVector, DescentOptions)> {
        let objective = match (self.objective, self.r, self.p) {
            (Some(obj), None, None) if self.c.is_none() => obj,
            (None, Some(r), Some(p)) => QuadraticObjective::new(r, p, self.c.unwrap_or(0.0))?,
            (None, Some(r), None) => {
                let n = r.rows();
                QuadraticObjective::new(r, QVector::zeros(n), self.c.unwrap_or(0.0))?
            }
            _ => {
                return Err(CliError::Input(
                    "give either \"objective\" or \"R\" (with optional \"p\", \"c\")".into(),
                ))
            }
        };
        let n = objective.dim();
        let prob = ConstrainedQP::new(objective, self.a, self.b)?;
        let q0 = self.q0.unwrap_or_else(|| QVector::zeros(n));
        let opts = DescentOptions {
            step: self.step,
            tol: self.tol.unwrap_or(DEFAULT_TOL),
            max_iter: self.max_iter.unwrap_or(DEFAULT_MAX_ITER),
        };
        Ok((prob, q0, opts))
    }
}

pub fn cmd_solve(kind: SolveKind, path: &Path) -> CliResult<SolveResult> {
    let mut res = match kind {
        SolveKind::Wiener => {
            let obj: QuadraticObjective = read_json(path)?;
            let mut res = wiener_solve(obj.r(), obj.p())?;
            res.objective_value = obj.evaluate(&res.q_opt)?;
            res
        }
        SolveKind::Projection => {
            let f: ProjectionFile = read_json(path)?;
            affine_projection(&f.a, &f.b, &f.y)?
        }
        SolveKind::Mvdr => {
            let f: MvdrFile = read_json(path)?;
            mvdr_beamform(&f.r, &f.a)?
        }
        SolveKind::Descent => {
            let f: DescentFile = read_json(path)?;
            let (prob, q0, opts) = f.problem()?;
            match prob.constraints() {
                None => gradient_descent(&prob.objective, &q0, &opts)?,
                Some(_) => projected_gradient(&prob, &q0, &opts)?,
            }
        }
    };
    // the per-iteration trace is a demo artifact, not part of the solve contract
    res.history.clear();
    Ok(res)
}
