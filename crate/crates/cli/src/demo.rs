//! Synthetic signal-processing scenarios behind `qcvx demo`.
//!
//! Each scenario draws a [`DemoDataset`] from one seed, forms sample moments,
//! solves in closed form and iteratively, and reports a per-iteration CSV
//! trace with a JSON summary.

use std::fmt;

use clap::ValueEnum;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use qcvx_core::ghr::QuadraticObjective;
use qcvx_core::optimize::{
    affine_projection, gradient_descent, mvdr_beamform, projected_gradient, wiener_solve,
    ConstrainedQP, DescentOptions,
};
use qcvx_core::random::{
    normal, random_matrix, random_unit_quaternion, random_vector, seeded, QRng,
};
use qcvx_core::{QMatrix, QVector, Quaternion};

use crate::error::{CliError, CliResult};

/// Power of a quaternion with i.i.d. standard normal components.
const UNIT_POWER: f64 = 4.0;
/// Snapshots required per weight.
pub const MIN_SNAPSHOTS_PER_WEIGHT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Wiener filter plus steepest descent. CSV: iteration,mse
    Filter,
    /// Block affine projection. CSV: iteration,mse,weight_error,constraint_residual
    Projection,
    /// MVDR beamformer plus projected gradient. CSV: iteration,output_power
    Beamform,
}

impl Scenario {
    pub fn csv_header(self) -> &'static [&'static str] {
        match self {
            Scenario::Filter => &["iteration", "mse"],
            Scenario::Projection => &["iteration", "mse", "weight_error", "constraint_residual"],
            Scenario::Beamform => &["iteration", "output_power"],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Filter => "filter",
            Scenario::Projection => "projection",
            Scenario::Beamform => "beamform",
        })
    }
}

/// SNR in dB. Serialized as a number, or the string `"inf"` for a noiseless run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnrDb(pub f64);

impl Serialize for SnrDb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for SnrDb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(SnrDb(v)),
            Raw::Text(t) if t == "inf" => Ok(SnrDb(f64::INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad snr_db {t:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemoConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub snapshots: usize,
    pub snr_db: f64,
    pub seed: u64,
}

impl DemoConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.n == 0 {
            return Err(CliError::Input("n must be at least 1".into()));
        }
        if self.snapshots < MIN_SNAPSHOTS_PER_WEIGHT * self.n {
            return Err(CliError::Input(format!(
                "need at least {} snapshots for n = {}, got {}",
                MIN_SNAPSHOTS_PER_WEIGHT * self.n,
                self.n,
                self.snapshots
            )));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(CliError::Input(format!(
                "snr_db must be a number or inf, got {}",
                self.snr_db
            )));
        }
        if self.scenario == Scenario::Beamform && self.snr_db.is_infinite() {
            // without sensor noise the array covariance is rank deficient
            return Err(CliError::Input("beamform needs finite snr_db".into()));
        }
        Ok(())
    }

    fn noise_power(&self, signal_power: f64) -> f64 {
        if self.snr_db.is_infinite() {
            0.0
        } else {
            signal_power / 10f64.powf(self.snr_db / 10.0)
        }
    }
}

/// Input snapshots `x(k)` as the columns of `x`, with desired outputs `d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoDataset {
    pub x: QMatrix,
    pub d: QVector,
    pub w_true: QVector,
    pub noise_power: f64,
    pub seed: u64,
    /// Steering vector, beamform only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steering: Option<QVector>,
}

fn noise(rng: &mut QRng, power: f64) -> Quaternion {
    if power == 0.0 {
        return Quaternion::ZERO;
    }
    let s = (power / UNIT_POWER).sqrt();
    Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng)) * s
}

impl DemoDataset {
    pub fn generate(cfg: &DemoConfig) -> CliResult<Self> {
        cfg.validate()?;
        let mut rng = seeded(cfg.seed);
        match cfg.scenario {
            Scenario::Filter | Scenario::Projection => Ok(Self::regression(cfg, &mut rng)),
            Scenario::Beamform => Self::array(cfg, &mut rng),
        }
    }

    /// `d(k) = w_trueᴴx(k) + v(k)`.
    fn regression(cfg: &DemoConfig, rng: &mut QRng) -> Self {
        let w_true = random_vector(rng, cfg.n);
        let x = random_matrix(rng, cfg.n, cfg.snapshots);
        let noise_power = cfg.noise_power(UNIT_POWER * w_true.norm_sqr());
        let d = (0..cfg.snapshots)
            .map(|k| w_true.hdot(&x.col(k)).expect("lengths agree") + noise(rng, noise_power))
            .collect();
        DemoDataset {
            x,
            d: QVector::new(d).expect("at least one snapshot"),
            w_true,
            noise_power,
            seed: cfg.seed,
            steering: None,
        }
    }

    /// `x(k) = a s(k) + b u(k) + v(k)` with one interferer `b`; `d` holds `s`.
    fn array(cfg: &DemoConfig, rng: &mut QRng) -> CliResult<Self> {
        let n = cfg.n;
        let steer = |rng: &mut QRng| {
            QVector::new((0..n).map(|_| random_unit_quaternion(rng)).collect()).expect("n >= 1")
        };
        let a = steer(rng);
        let b = steer(rng);
        let noise_power = cfg.noise_power(UNIT_POWER);
        let mut cols = Vec::with_capacity(cfg.snapshots);
        let mut d = Vec::with_capacity(cfg.snapshots);
        for _ in 0..cfg.snapshots {
            let s = Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng));
            let u = Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng));
            let col: Vec<Quaternion> = (0..n)
                .map(|i| a[i] * s + b[i] * u + noise(rng, noise_power))
                .collect();
            cols.push(col);
            d.push(s);
        }
        let x = QMatrix::from_fn(n, cfg.snapshots, |r, c| cols[c][r]);
        // R = E{x xᴴ} = 4aaᴴ + 4bbᴴ + σ²I
        let outer = |v: &QVector| {
            v.to_column()
                .matmul(&v.to_hermitian_row())
                .expect("conformable")
        };
        let r_true = outer(&a)
            .try_add(&outer(&b))?
            .scale(UNIT_POWER)
            .try_add(&QMatrix::identity(n).scale(noise_power))?;
        let w_true = mvdr_beamform(&r_true, &a)?.q_opt;
        Ok(DemoDataset {
            x,
            d: QVector::new(d)?,
            w_true,
            noise_power,
            seed: cfg.seed,
            steering: Some(a),
        })
    }

    pub fn snapshots(&self) -> usize {
        self.x.cols()
    }

    /// `R̂ = (1/N)Σ x(k)x(k)ᴴ`, symmetrized against roundoff.
    pub fn sample_correlation(&self) -> CliResult<QMatrix> {
        let r = self
            .x
            .matmul(&self.x.hermitian_transpose())?
            .scale(1.0 / self.snapshots() as f64);
        Ok(r.try_add(&r.hermitian_transpose())?.scale(0.5))
    }

    /// `p̂ = (1/N)Σ x(k)d*(k)`.
    pub fn sample_cross_correlation(&self) -> CliResult<QVector> {
        Ok(self
            .x
            .matvec(&self.d.conj())?
            .scale(1.0 / self.snapshots() as f64))
    }

    /// Sample mean-square error `(1/N)Σ|d(k) − wᴴx(k)|²` as a quadratic objective.
    pub fn sample_objective(&self) -> CliResult<QuadraticObjective> {
        let c = self.d.norm_sqr() / self.snapshots() as f64;
        Ok(QuadraticObjective::new(
            self.sample_correlation()?,
            self.sample_cross_correlation()?,
            c,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoSummary {
    pub scenario: Scenario,
    pub n: usize,
    pub snapshots: usize,
    pub snr_db: SnrDb,
    pub seed: u64,
    pub noise_power: f64,
    pub iterations: usize,
    /// `‖ŵ − w_true‖` for the scenario's estimate.
    pub weight_error: f64,
    /// Last value in the CSV trace.
    pub final_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling_bound: Option<f64>,
    /// Distance from the iterative solution to the closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descent_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint_residual: Option<f64>,
    pub w_hat: QVector,
    pub w_true: QVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemoOutput {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: DemoSummary,
}

impl DemoOutput {
    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Failure(format!("csv: {e}"));
        w.write_record(&self.header).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))
                .map_err(fail)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Failure(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Failure(e.to_string()))
    }
}

/// Reads a CSV produced by [`DemoOutput::to_csv`].
pub fn parse_csv(text: &str) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: csv::Error| CliError::Input(format!("csv: {e}"));
    let header = r
        .headers()
        .map_err(bad)?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(bad)?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| CliError::Input(format!("csv field {f:?}: {e}")))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn run_demo(cfg: &DemoConfig) -> CliResult<DemoOutput> {
    let data = DemoDataset::generate(cfg)?;
    let obj = data.sample_objective()?;
    let opts = DescentOptions::default();
    let header = cfg
        .scenario
        .csv_header()
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut summary = DemoSummary {
        scenario: cfg.scenario,
        n: cfg.n,
        snapshots: cfg.snapshots,
        snr_db: SnrDb(cfg.snr_db),
        seed: cfg.seed,
        noise_power: data.noise_power,
        iterations: 0,
        weight_error: 0.0,
        final_value: 0.0,
        sampling_bound: None,
        descent_distance: None,
        constraint_residual: None,
        w_hat: data.w_true.clone(),
        w_true: data.w_true.clone(),
    };
    let rows: Vec<Vec<f64>> = match cfg.scenario {
        Scenario::Filter => {
            let w_hat = wiener_solve(obj.r(), obj.p())?.q_opt;
            let desc = gradient_descent(&obj, &QVector::zeros(cfg.n), &opts)?;
            summary.iterations = desc.iterations;
            summary.descent_distance = Some(desc.q_opt.distance(&w_hat)?);
            summary.sampling_bound = Some(5.0 / (cfg.snapshots as f64).sqrt());
            summary.w_hat = w_hat;
            desc.history
                .iter()
                .enumerate()
                .map(|(k, &f)| vec![k as f64, f])
                .collect()
        }
        Scenario::Projection => {
            let block = (cfg.n / 2).max(1);
            let mut w = QVector::zeros(cfg.n);
            let mut rows = Vec::new();
            for (k, start) in (0..data.snapshots() - block + 1).step_by(block).enumerate() {
                // rows x(j)ᴴ with targets d*(j), so that x(j)ᴴw = d*(j)
                let a = QMatrix::from_fn(block, cfg.n, |r, c| data.x.get(c, start + r).conj());
                let b = QVector::new((0..block).map(|r| data.d[start + r].conj()).collect())?;
                let step = affine_projection(&a, &b, &w)?;
                w = step.q_opt;
                rows.push(vec![
                    (k + 1) as f64,
                    obj.evaluate(&w)?,
                    w.distance(&data.w_true)?,
                    step.residuals.constraint.unwrap_or(0.0),
                ]);
            }
            summary.iterations = rows.len();
            summary.constraint_residual = rows.last().map(|r| r[3]);
            summary.w_hat = w;
            rows
        }
        Scenario::Beamform => {
            let a = data
                .steering
                .clone()
                .expect("beamform data carries steering");
            let r = obj.r().clone();
            let res = mvdr_beamform(&r, &a)?;
            let power = QuadraticObjective::new(r, QVector::zeros(cfg.n), 0.0)?;
            let row = QMatrix::new(1, cfg.n, a.conj().into_vec())?;
            let prob = ConstrainedQP::new(power, Some(row), Some(QVector::basis(1, 0)))?;
            let iter = projected_gradient(&prob, &QVector::zeros(cfg.n), &opts)?;
            summary.iterations = iter.iterations;
            summary.descent_distance = Some(iter.q_opt.distance(&res.q_opt)?);
            summary.constraint_residual = Some((res.q_opt.hdot(&a)? - Quaternion::ONE).norm());
            summary.w_hat = res.q_opt;
            iter.history
                .iter()
                .enumerate()
                .map(|(k, &f)| vec![k as f64, f])
                .collect()
        }
    };
    summary.weight_error = summary.w_hat.distance(&summary.w_true)?;
    summary.final_value = rows.last().map(|r| r[1]).unwrap_or(f64::NAN);
    Ok(DemoOutput {
        header,
        rows,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(scenario: Scenario, snr_db: f64) -> DemoConfig {
        DemoConfig {
            scenario,
            n: 3,
            snapshots: 400,
            snr_db,
            seed: 5,
        }
    }

    #[test]
    fn noiseless_filter_recovers_true_weights() {
        let out = run_demo(&DemoConfig {
            snapshots: 4000,
            ..cfg(Scenario::Filter, f64::INFINITY)
        })
        .unwrap();
        let s = &out.summary;
        assert!(s.weight_error <= s.sampling_bound.unwrap());
        assert!(s.weight_error < 1e-9);
        assert!(s.descent_distance.unwrap() < 1e-6);
    }

    #[test]
    fn noisy_filter_within_sampling_bound() {
        let out = run_demo(&DemoConfig {
            snapshots: 10_000,
            ..cfg(Scenario::Filter, 20.0)
        })
        .unwrap();
        assert!(out.summary.weight_error <= out.summary.sampling_bound.unwrap());
    }

    #[test]
    fn beamform_meets_constraint() {
        let out = run_demo(&cfg(Scenario::Beamform, 10.0)).unwrap();
        assert!(out.summary.constraint_residual.unwrap() <= 1e-12);
        assert!(out.summary.descent_distance.unwrap() < 1e-5);
    }

    #[test]
    fn projection_iterates_satisfy_their_block() {
        let out = run_demo(&cfg(Scenario::Projection, f64::INFINITY)).unwrap();
        assert_eq!(out.header.len(), 4);
        assert!(out.rows.iter().all(|r| r[3] < 1e-10));
        assert!(out.summary.weight_error < 1e-8);
    }

    #[test]
    fn csv_round_trips() {
        let out = run_demo(&cfg(Scenario::Filter, 15.0)).unwrap();
        let (header, rows) = parse_csv(&out.to_csv().unwrap()).unwrap();
        assert_eq!(header, out.header);
        assert_eq!(rows, out.rows);
    }

    #[test]
    fn rejects_bad_sizes() {
        for c in [
            DemoConfig {
                n: 0,
                ..cfg(Scenario::Filter, 10.0)
            },
            DemoConfig {
                snapshots: 29,
                ..cfg(Scenario::Filter, 10.0)
            },
            cfg(Scenario::Filter, f64::NAN),
            cfg(Scenario::Beamform, f64::INFINITY),
        ] {
            assert!(matches!(run_demo(&c), Err(CliError::Input(_))), "{c:?}");
        }
    }

    #[test]
    fn snr_serializes_inf_as_string() {
        assert_eq!(
            serde_json::to_string(&SnrDb(f64::INFINITY)).unwrap(),
            "\"inf\""
        );
        let back: SnrDb = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(back, SnrDb(f64::INFINITY));
    }
}
