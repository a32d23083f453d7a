mod args;
mod commands;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use stham_core::Error;

use args::{Cli, Command};

/// Exit code 1: an asserted check failed.
const EXIT_ASSERTION: u8 = 1;
/// Exit code 2: bad input or an instance outside the supported regime.
const EXIT_INPUT: u8 = 2;
/// Exit code 3: a numerical routine did not converge.
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } => Failure::Numerical(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("STHAM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.parse().map_err(|_| {
        Failure::Input(format!(
            "STHAM_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<commands::Outcome, Failure> {
    configure_threads()?;
    let common = &cli.common;
    match &cli.command {
        Command::Gap => commands::gap(common),
        Command::Verify { only } => commands::verify(common, *only),
        Command::Qma { toy, angle } => commands::qma(common, *toy, *angle),
        Command::Markov { tv, samples } => commands::markov(common, *tv, *samples),
        Command::Fermion { clock } => commands::fermion(common, *clock),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INPUT);
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    let written = match &cli.common.out {
        Some(path) => {
            fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => std::io::stdout()
            .write_all(outcome.text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INPUT);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("assertion failed; see the report");
        ExitCode::from(EXIT_ASSERTION)
    }
}
