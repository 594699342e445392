//! `bilayer-lab`: construct composite solutions, sample existence diagrams,
//! run simulations and verification suites. Outputs are CSV and key=value
//! text files.
//!
//! Exit codes: 0 ok, 1 usage, 2 constraint violation, 3 solver abort,
//! 4 verification failure.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod config;
mod construct;
mod diagram;
mod output;
mod presets;
mod simulate;
mod verify;

use std::process::ExitCode;

use args::{ArgError, Command};
use output::{CmdError, EXIT_USAGE};

/// Sizes the global worker pool from `BILAYER_LAB_THREADS`.
fn configure_threads() -> Result<(), CmdError> {
    let Ok(text) = std::env::var("BILAYER_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = text.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CmdError::usage(format!(
            "BILAYER_LAB_THREADS must be a positive integer, got `{text}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CmdError::usage(format!("cannot size the worker pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match args::parse(std::env::args().collect()) {
        Ok(cli) => cli,
        Err(ArgError::Display(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(ArgError::Usage(text)) => {
            eprintln!("{}", text.trim_end());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Construct(a) => construct::run(a),
        Command::Diagram(a) => diagram::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Verify(a) => verify::run(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
