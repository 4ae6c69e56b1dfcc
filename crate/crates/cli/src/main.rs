//! `qcweyl`: batch verification harness. Each command runs one suite, prints
//! one line per check to stderr and the JSON report to stdout or `--out`.
//!
//! Exit codes: 0 all checks pass, 1 a check or input invariant fails,
//! 2 usage or input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qcweyl_core::io;
use qcweyl_core::report::{self, Report};
use qcweyl_core::weyl::{self, QCPointData};
use qcweyl_core::{Error, Exact, Scalar};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "qcweyl", version, about = "Verification harness for quaternionic contact Weyl curvature")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Quaternionic dimension, at least 1.
    #[arg(long, global = true, default_value_t = 1)]
    n: usize,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,

    /// Absolute tolerance; ignored in exact mode.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Input point data (weyl only).
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,

    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    Algebra,
    Cohomology,
    Commutators,
    Weyl,
    Heisenberg,
    Selftest,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Exact,
    Float,
}

enum Failure {
    Checks,
    Invariant(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant { .. } => Failure::Invariant(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn run_suite<S: Scalar>(cli: &Cli) -> Result<Report, Error> {
    let (n, seed, tol) = (cli.n, cli.seed, cli.tol);
    match cli.command {
        Command::Algebra => report::algebra_report::<S>(n, seed, tol),
        Command::Cohomology => report::cohomology_report::<S>(n, seed, tol),
        Command::Commutators => {
            let pairs = if n == 1 { 1_000 } else { 10_000 };
            report::commutators_report::<S>(n, seed, pairs, tol)
        }
        Command::Weyl => {
            let data: QCPointData<S> = match &cli.input {
                Some(path) => {
                    let v = io::read_json(path)?;
                    // the point data may be embedded in a heisenberg report
                    let v = v.get("outputs").and_then(|o| o.get("point_data")).cloned().unwrap_or(v);
                    io::point_data_from_json(&v, tol)?
                }
                None => weyl::generate_consistent_data(n, seed)?,
            };
            let seed = if cli.input.is_some() { None } else { Some(seed) };
            report::weyl_report(&data, seed, tol)
        }
        Command::Heisenberg => report::heisenberg_report::<S>(n, tol),
        Command::Selftest => report::selftest::<S>(seed, tol),
    }
}

fn emit(cli: &Cli, v: &Value) -> Result<(), Failure> {
    let text = io::to_pretty(v)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    if cli.mode == ModeArg::Float && !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(Failure::Usage("--tol must be a finite non-negative number".into()));
    }
    if cli.input.is_some() && cli.command != Command::Weyl {
        return Err(Failure::Usage("--in is only accepted by `weyl`".into()));
    }
    let rep = match cli.mode {
        ModeArg::Exact => run_suite::<Exact>(cli)?,
        ModeArg::Float => run_suite::<f64>(cli)?,
    };
    for line in rep.summary_lines() {
        eprintln!("{line}");
    }
    emit(cli, &rep.to_json())?;
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
