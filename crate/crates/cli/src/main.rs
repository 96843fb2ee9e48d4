//! `sl2h`: quaternionic Möbius maps from the command line.
//!
//! Exit status is 0 on success, 1 when `--assert` is given and a violated
//! certificate was produced, and 2 on any input or usage error.

mod input;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sl2h_core::harness::{run_testmap_experiment, ExperimentConfig, Mode, SampleDistribution};
use sl2h_core::jorgensen::{
    jorgensen_elliptic_hyperbolic, jorgensen_general, shimizu_translation, testmap_admissible,
};
use sl2h_core::{classify, fixed_points, Certificate, Complex64, MatH2, Tolerances};

use input::{read_input, JorgensenInput, MatrixInput};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Core(#[from] sl2h_core::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "sl2h", version, about = "Quaternionic 2x2 matrices, Moebius maps and Jorgensen-type certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON input file; `-` or absent reads stdin (unless `--seed` samples one)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Seed for sampled inputs and experiments
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the command's primary tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Write the result here instead of stdout
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Exit with status 1 if any produced certificate is violated
    #[arg(long = "assert")]
    assert_mode: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dieudonné determinant
    Det(Common),
    /// Two-sided inverse
    Inverse(Common),
    /// Dynamical type with at, abt and tau
    Classify(Common),
    /// Boundary fixed points
    Fixedpoints(Common),
    /// Jørgensen-type inequality certificate
    Jorgensen(Common),
    /// Admissibility of a test map
    Testmap(Common),
    /// Perturbed-conjugator sequence experiment, written as JSONL
    Experiment {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_mode)]
        mode: Mode,
        #[arg(long)]
        trials: Option<usize>,
        /// Full report (configuration, assumptions, fixed points, limits) as JSON
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse::<Mode>().map_err(|_| {
        let names: Vec<&str> = Mode::ALL.iter().map(|m| m.as_str()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn check_tol(tol: Option<f64>) -> Result<Option<f64>> {
    match tol {
        Some(t) if !(t >= 0.0 && t.is_finite()) => Err(CliError::Usage(format!("--tol must be a non-negative number, got {t}"))),
        other => Ok(other),
    }
}

fn tolerances(common: &Common, set: impl FnOnce(&mut Tolerances, f64)) -> Result<Tolerances> {
    let mut tol = Tolerances::default();
    if let Some(t) = check_tol(common.tol)? {
        set(&mut tol, t);
    }
    Ok(tol)
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<T: Serialize + ?Sized>(common: &Common, value: &T) -> Result<()> {
    let mut out = sink(&common.output)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn matrix_input(common: &Common) -> Result<(MatH2, Option<Value>)> {
    if common.input.is_none() {
        if let Some(seed) = common.seed {
            let dist = SampleDistribution::default();
            let m = sl2h_core::harness::sample_sl2h_seeded(seed, &dist);
            return Ok((m, Some(json!({ "seed": seed, "sample": dist }))));
        }
    }
    let input: MatrixInput = read_input(common.input.as_deref())?;
    Ok((input.into_matrix(), None))
}

/// A result, plus the sampled input when `--seed` replaced `--input`.
#[derive(Serialize)]
struct Output<'a, T: Serialize> {
    #[serde(flatten)]
    result: &'a T,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampled: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<&'a MatH2>,
}

fn emit_result<T: Serialize>(common: &Common, result: &T, sample: Option<Value>, m: &MatH2) -> Result<()> {
    let matrix = sample.is_some().then_some(m);
    emit(common, &Output { result, sampled: sample, matrix })
}

/// Whether the run produced a violated certificate.
type Violated = bool;

fn certificate_out(common: &Common, cert: &Certificate) -> Result<Violated> {
    emit(common, cert)?;
    Ok(cert.is_violated())
}

fn run(cli: Cli) -> Result<(Violated, bool)> {
    let (violated, assert_mode) = match cli.command {
        Command::Det(c) => {
            let tol = tolerances(&c, |t, v| t.det = v)?;
            let (m, sample) = matrix_input(&c)?;
            let det = m.det();
            emit_result(&c, &json!({ "det": det, "sl": m.is_sl(tol.det) }), sample, &m)?;
            (false, c.assert_mode)
        }
        Command::Inverse(c) => {
            let tol = tolerances(&c, |t, v| t.det = v)?;
            let (m, sample) = matrix_input(&c)?;
            let inv = m.inverse(tol.det)?;
            let route = if m.inverse_by_formula().is_some() { "formula" } else { "embedding" };
            emit_result(&c, &json!({ "inverse": inv, "route": route }), sample, &m)?;
            (false, c.assert_mode)
        }
        Command::Classify(c) => {
            let tol = tolerances(&c, |t, v| t.cls = v)?;
            let (m, sample) = matrix_input(&c)?;
            let cls = classify(&m, &tol)?;
            emit_result(&c, &cls, sample, &m)?;
            (false, c.assert_mode)
        }
        Command::Fixedpoints(c) => {
            let tol = tolerances(&c, |t, v| t.fix = v)?;
            let (m, sample) = matrix_input(&c)?;
            let points = fixed_points(&m, &tol)?;
            emit_result(&c, &json!({ "fixed_points": points }), sample, &m)?;
            (false, c.assert_mode)
        }
        Command::Jorgensen(c) => {
            let tol = tolerances(&c, |t, v| t.cert = v)?;
            let cert = match read_input::<JorgensenInput>(c.input.as_deref())? {
                JorgensenInput::Pair { s, t } => jorgensen_elliptic_hyperbolic(&s, &t, &tol)?,
                JorgensenInput::Translation { s, mu } => shimizu_translation(&s, mu, &tol),
                JorgensenInput::General { lambda, mu, bc_norm } => {
                    jorgensen_general(Complex64::new(lambda[0], lambda[1]), Complex64::new(mu[0], mu[1]), bc_norm, &tol)?
                }
            };
            (certificate_out(&c, &cert)?, c.assert_mode)
        }
        Command::Testmap(c) => {
            let tol = tolerances(&c, |t, v| t.cert = v)?;
            let (m, _) = matrix_input(&c)?;
            let cert = testmap_admissible(&m, &tol)?;
            (certificate_out(&c, &cert)?, c.assert_mode)
        }
        Command::Experiment {
            common: c,
            mode,
            trials,
            report,
        } => {
            let mut config: ExperimentConfig = match &c.input {
                Some(_) => read_input(c.input.as_deref())?,
                None => ExperimentConfig::default(),
            };
            if let Some(seed) = c.seed {
                config.seed = seed;
            }
            if let Some(trials) = trials {
                config.trials = trials;
            }
            if let Some(t) = check_tol(c.tol)? {
                config.tolerances.cert = t;
            }
            let result = run_testmap_experiment(&config, mode)?;
            result.write_jsonl(sink(&c.output)?)?;
            if let Some(path) = report {
                let mut w = BufWriter::new(File::create(path)?);
                serde_json::to_writer(&mut w, &result)?;
                w.flush()?;
            }
            let summary: Vec<Value> = result
                .trials
                .iter()
                .map(|t| json!({ "trial": t.trial, "violation_index": t.violation_index, "burn_in": t.burn_in }))
                .collect();
            eprintln!("{}", json!({ "mode": mode, "seed": config.seed, "trials": summary }));
            let violated = result.records().any(|r| r.certificate.is_violated());
            (violated, c.assert_mode)
        }
    };
    Ok((violated, assert_mode))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((true, true)) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sl2h: {e}");
            ExitCode::from(2)
        }
    }
}
