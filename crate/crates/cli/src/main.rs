//! `qalloc`: run allocation, equitability, robustness and Bell-identity
//! problems from JSON problem files and emit deterministic reports.
//!
//! Exit codes: 0 success, 1 failed check or I/O error, 2 schema error,
//! 3 domain error, 4 infeasible, 5 cap exceeded.

mod commands;
mod problem;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use qalloc_core::bell::ProjectorSource;
use qalloc_core::Error;
use serde_json::{json, Value};

use problem::{AllocationProblem, BellVerifyProblem, EquitableProblem, Kind, RobustnessProblem};
use report::{Format, Provenance, Report};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn schema(path: &str, msg: impl std::fmt::Display) -> Self {
        Self {
            code: 2,
            message: format!("schema error at {path}: {msg}"),
        }
    }

    pub fn domain(msg: impl std::fmt::Display) -> Self {
        Self {
            code: 3,
            message: format!("domain error: {msg}"),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: 1,
            message: format!("{}: {e}", path.display()),
        }
    }

    pub fn internal(e: impl std::fmt::Display) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }

    /// Map a library error raised while processing the input section at `path`.
    pub fn at(path: &str, e: Error) -> Self {
        let code = match &e {
            Error::Domain(_) | Error::InvalidParameter(_) => 3,
            Error::Infeasible(_) => 4,
            Error::CapExceeded(_) | Error::Indeterminate { .. } => 5,
            _ => 2,
        };
        let message = if code == 2 {
            format!("schema error at {path}: {e}")
        } else {
            format!("{path}: {e}")
        };
        Self { code, message }
    }
}

#[derive(Parser)]
#[command(name = "qalloc", version, about = "Quantum resource allocation over hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random stream.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Main numerical tolerance of the subcommand.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal allocation on a hypergraph and its performance.
    Allocate {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Lexicographic max-min solution of a knapsack problem.
    Equitable {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Generalized incompatibility robustness of an assembly (--tol: bisection width).
    Robustness {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check the Bell-operator identity on random or corner projectors (--tol: pass threshold).
    BellVerify {
        problem: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_parser = parse_source)]
        source: Option<ProjectorSource>,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_source(s: &str) -> Result<ProjectorSource, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| format!("unknown source {s:?} (random, zero, identity)"))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let start = Instant::now();
    let (name, common, inputs, outcome) = match cli.command {
        Command::Allocate { problem, common } => {
            let (p, raw) = problem::parse::<AllocationProblem>(&read(&problem)?, Kind::Allocation)?;
            ("allocate", common, raw, commands::allocate(&p)?)
        }
        Command::Equitable { problem, common } => {
            let (p, raw) = problem::parse::<EquitableProblem>(&read(&problem)?, Kind::Equitable)?;
            ("equitable", common, raw, commands::equitable(&p)?)
        }
        Command::Robustness { problem, common } => {
            let (p, raw) = problem::parse::<RobustnessProblem>(&read(&problem)?, Kind::Robustness)?;
            let out = commands::robustness(&p, common.tol, common.format == Format::Json)?;
            ("robustness", common, raw, out)
        }
        Command::BellVerify {
            problem,
            trials,
            source,
            common,
        } => {
            let parsed = problem
                .as_deref()
                .map(|path| problem::parse::<BellVerifyProblem>(&read(path)?, Kind::BellVerify))
                .transpose()?;
            let (p, raw) = match parsed {
                Some((p, raw)) => (Some(p), raw),
                None => (None, Value::Null),
            };
            let out = commands::bell_verify(p.as_ref(), trials, source, common.seed, common.tol)?;
            let raw = json!({"problem": raw, "trials": trials, "source": source});
            ("bell-verify", common, raw, out)
        }
    };
    let report = Report {
        command: name,
        inputs,
        results: outcome.results,
        provenance: Provenance {
            tool: "qalloc",
            version: env!("CARGO_PKG_VERSION"),
            seed: common.seed,
            tolerances: outcome.tolerances,
        },
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    report::emit(&report.render(common.format)?, common.out.as_deref())?;
    Ok(!outcome.failed_check)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qalloc: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
