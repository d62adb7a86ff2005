//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any fails.

use std::process::{Command, ExitCode};

use qcvx_cli::verify::{run_suite, CheckResult, Status, VerifyConfig};

const SEED: u64 = 20_240_601;
/// Random instances per identity.
const SAMPLES: usize = 100;

const TITLES: [&str; 9] = [
    "algebraic identities",
    "derivative oracle",
    "hessian bridge",
    "convexity certificates",
    "strong convexity",
    "wiener filter",
    "affine projection",
    "mvdr beamformer",
    "formulation equivalence",
];

fn worst(checks: &[&CheckResult]) -> String {
    // the check closest to (or furthest past) its tolerance
    let ratio = |c: &CheckResult| {
        if c.tolerance > 0.0 {
            c.max_violation / c.tolerance
        } else {
            c.max_violation
        }
    };
    let w = checks
        .iter()
        .max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
        .expect("every criterion has checks");
    match &w.error {
        Some(e) => format!("{} errored: {e}", w.name),
        None => format!(
            "worst {} {:.3e} <= {:.0e}",
            w.name, w.max_violation, w.tolerance
        ),
    }
}

fn run_bin(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qcvx"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {:?}", out.status.code()));
    }
    let mut bytes = out.stdout;
    bytes.extend(out.stderr);
    Ok(bytes)
}

fn determinism() -> (bool, String) {
    let seed = SEED.to_string();
    let runs: [Vec<&str>; 4] = [
        vec!["verify", "--seed", &seed, "--samples", "20"],
        vec![
            "demo",
            "filter",
            "--n",
            "4",
            "--snapshots",
            "400",
            "--snr-db",
            "15",
            "--seed",
            &seed,
        ],
        vec![
            "demo",
            "projection",
            "--n",
            "4",
            "--snapshots",
            "400",
            "--snr-db",
            "15",
            "--seed",
            &seed,
        ],
        vec![
            "demo",
            "beamform",
            "--n",
            "4",
            "--snapshots",
            "400",
            "--snr-db",
            "15",
            "--seed",
            &seed,
        ],
    ];
    let mut differing = Vec::new();
    for args in &runs {
        match (run_bin(args), run_bin(args)) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => differing.push(args[..2].join(" ")),
            (Err(e), _) | (_, Err(e)) => return (false, e),
        }
    }
    if differing.is_empty() {
        (
            true,
            format!("{} commands byte-identical across two runs", runs.len()),
        )
    } else {
        (
            false,
            format!("output differs for {}", differing.join(", ")),
        )
    }
}

fn main() -> ExitCode {
    let report = run_suite(&VerifyConfig::new(SEED, SAMPLES), None);
    let mut all = true;
    for (i, title) in TITLES.iter().enumerate() {
        let c = i as u8 + 1;
        let checks: Vec<&CheckResult> = report.checks.iter().filter(|r| r.criterion == c).collect();
        let passed = checks.iter().filter(|r| r.status == Status::Pass).count();
        let ok = !checks.is_empty() && passed == checks.len();
        all &= ok;
        println!(
            "{} criterion {c:>2} {title}: {passed}/{} checks, {}",
            if ok { "PASS" } else { "FAIL" },
            checks.len(),
            worst(&checks)
        );
    }
    let (ok, detail) = determinism();
    all &= ok;
    println!(
        "{} criterion 10 determinism: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
