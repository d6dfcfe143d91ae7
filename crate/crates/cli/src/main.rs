//! `nvsk` — command-line front end for the NV-diamond sensitivity toolkit.
//!
//! Numerical output goes to stdout (or `--out`) as CSV with `#` metadata
//! comment lines; diagnostics go to stderr. Exit codes: 0 success,
//! 1 validation error, 2 usage error. `NVSK_THREADS` caps Monte Carlo
//! parallelism; results are independent of the thread count.

// Negated comparisons (`!(v > 0.0)`) are deliberate: NaN fails closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod grid;
mod run;

use std::process::ExitCode;

use clap::Parser;

use run::{run, CliError};

#[derive(Debug, Parser)]
#[command(name = "nvsk", version, about = "NV-diamond magnetometer sensitivity toolkit")]
pub struct Cli {
    /// Sample descriptor file (JSON).
    #[arg(long, global = true)]
    sample: Option<std::path::PathBuf>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// RNG seed for simulation subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format (only `csv`).
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    #[command(subcommand)]
    command: run::Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.format != "csv" {
        eprintln!("error: unsupported output format `{}` (only csv)", cli.format);
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            eprintln!("run `nvsk --help` for a synopsis");
            ExitCode::from(2)
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
