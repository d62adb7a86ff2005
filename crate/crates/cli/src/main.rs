use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcvx_cli::commands::{cmd_check, cmd_solve, cmd_verify, to_json, SampleOptions, SolveKind};
use qcvx_cli::demo::{run_demo, DemoConfig, Scenario};
use qcvx_cli::error::{CliError, CliResult};
use qcvx_cli::verify::{VerifyConfig, DEFAULT_SAMPLES};
use qcvx_core::convexity::SAMPLE_TOL;

/// Quaternion convexity certificates, closed-form solvers and a verification suite.
///
/// Exit status: 0 on success, 1 when a check, certificate or solve fails,
/// 2 on malformed input.
#[derive(Parser, Debug)]
#[command(name = "qcvx", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the identity and verification suite and print a JSON report.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instances per identity.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Relative tolerance for sampled certificate checks.
        #[arg(long, default_value_t = SAMPLE_TOL)]
        tol: f64,
        /// Only run these criteria (1 to 9).
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u8>,
        /// Record wall-clock time per check. Makes the report non-reproducible.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a quadratic objective {"R","p","c"?} and estimate its strong-convexity parameter.
    Check {
        problem: PathBuf,
        /// Also run the first-order and monotonicity sampling refuters.
        #[arg(long)]
        sample: bool,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SAMPLE_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a problem file and print the result with its residuals.
    Solve {
        #[arg(value_enum)]
        kind: SolveKind,
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic data, solve, and emit a CSV trace plus a JSON summary.
    ///
    /// CSV columns: filter = iteration,mse; projection =
    /// iteration,mse,weight_error,constraint_residual; beamform =
    /// iteration,output_power. Numbers use Rust exponent notation.
    /// With --out the CSV goes to that file and the summary to stdout;
    /// otherwise the CSV goes to stdout and the summary to stderr.
    Demo {
        #[arg(value_enum)]
        scenario: Scenario,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Snapshots N, at least 10n.
        #[arg(long, default_value_t = 1000)]
        snapshots: usize,
        /// Signal-to-noise ratio in dB; `inf` for no noise.
        #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
        snr_db: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| CliError::io(path, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Verify {
            seed,
            samples,
            tol,
            criterion,
            timing,
            out,
        } => {
            let cfg = VerifyConfig {
                seed,
                samples,
                sample_tol: tol,
                timing,
            };
            let only = (!criterion.is_empty()).then_some(criterion.as_slice());
            let report = cmd_verify(&cfg, only)?;
            emit(&to_json(&report)?, out.as_deref())?;
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Check {
            problem,
            sample,
            samples,
            seed,
            tol,
            out,
        } => {
            let opts = sample.then_some(SampleOptions { samples, seed, tol });
            let report = cmd_check(&problem, opts)?;
            emit(&to_json(&report)?, out.as_deref())?;
            Ok(if report.refuted() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Solve { kind, problem, out } => {
            let res = cmd_solve(kind, &problem)?;
            emit(&to_json(&res)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Demo {
            scenario,
            n,
            snapshots,
            snr_db,
            seed,
            out,
        } => {
            let demo = run_demo(&DemoConfig {
                scenario,
                n,
                snapshots,
                snr_db,
                seed,
            })?;
            let csv = demo.to_csv()?;
            let summary = to_json(&demo.summary)?;
            match out {
                Some(path) => {
                    fs::write(&path, csv).map_err(|e| CliError::io(&path, e))?;
                    println!("{summary}");
                }
                None => {
                    print!("{csv}");
                    eprintln!("{summary}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("qcvx: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
