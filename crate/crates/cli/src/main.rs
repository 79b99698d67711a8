//! `orthant-t2`: conservative bounds for Hotelling's T² under orthant
//! symmetry.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on usage,
//! input or domain errors.

mod input;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use orthant_t2::chi_kernel::Degree;
use orthant_t2::extremal::q_bound;
use orthant_t2::symmetry_test::{conservativeness_table, critical_chain, render_table, run_test};
use orthant_t2::verify::{run_suite, Suite, SuiteConfig, DEFAULT_BUDGET, DEFAULT_SEED};

/// Environment variable capping enumeration threads.
const THREADS_VAR: &str = "ORTHANT_T2_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] orthant_t2::Error),
    #[error("{0}")]
    Input(String),
    #[error("malformed cell at row {row}, column {column}: '{cell}'")]
    Cell {
        row: u64,
        column: usize,
        cell: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("could not serialise output: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "orthant-t2",
    version,
    about = "Conservative bounds for Hotelling's T² under orthant symmetry"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extremal tail bound Q_r(u) and its comparison with the χ tail.
    Qbound {
        #[arg(long)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        u: f64,
    },
    /// Critical values x_d(δ), x_d(δ/c) and z_δ.
    Critval {
        #[arg(long)]
        d: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Table of critical values over several dimensions.
    Table {
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,20,50")]
        dims: Vec<f64>,
    },
    /// R², T² and conservative p-value bounds for a CSV sample.
    T2 {
        #[arg(long)]
        input: PathBuf,
        /// Dimension for the bound; defaults to the number of columns.
        #[arg(long)]
        dim: Option<f64>,
    },
    /// Run a named verification suite.
    Verify {
        /// One of: moments, tails, mlr, lambda, identities, table.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random instances per corpus.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
}

fn threads() -> Result<usize, CliError> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!(
                "{THREADS_VAR} must be a positive integer, got '{v}'"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn emit<T: Serialize>(
    format: Format,
    value: &T,
    text: impl FnOnce(&T) -> String,
) -> Result<(), CliError> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Format::Text => print!("{}", text(value)),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Qbound { r, u } => {
            let rep = q_bound(Degree::new(r)?, u)?;
            emit(format, &rep, render::bound)?;
        }
        Command::Critval { d, delta } => {
            let t = critical_chain(Degree::new(d)?, delta)?;
            emit(format, &t, render::triple)?;
        }
        Command::Table { delta, dims } => {
            let dims = dims
                .into_iter()
                .map(Degree::new)
                .collect::<Result<Vec<_>, _>>()?;
            let rows = conservativeness_table(delta, &dims)?;
            emit(format, &rows, |r| render_table(r))?;
        }
        Command::T2 { input, dim } => {
            let x = input::read_sample(&input)?;
            let declared = dim.map(Degree::new).transpose()?;
            let rep = run_test(&x, declared)?;
            emit(format, &rep, render::sample)?;
        }
        Command::Verify {
            suite,
            seed,
            budget,
        } => {
            let suite: Suite = suite.parse()?;
            let cfg = SuiteConfig {
                seed,
                budget,
                threads: threads()?,
            };
            let rep = run_suite(suite, &cfg)?;
            emit(format, &rep, render::suite)?;
            if !rep.passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
