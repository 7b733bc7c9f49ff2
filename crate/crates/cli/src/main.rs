//! `hypercubic`: counting, constants, convergence tables, local densities
//! and the verification suites from the command line.
//!
//! Exit status: 0 success, 1 verification or consistency failure,
//! 2 usage error.

mod args;
mod commands;
mod output;

use std::fmt;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<hypercubic_core::Error> for CliError {
    fn from(e: hypercubic_core::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Failure(_) => ExitCode::from(1),
        }
    }
}

fn execute(config: &RunConfig) -> Result<commands::Outcome, CliError> {
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Failure(format!("cannot start {n} worker threads: {e}")))?
            .install(|| commands::run(config)),
        None => commands::run(config),
    }
}

fn emit(config: &RunConfig, report: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => std::fs::write(path, report)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(report.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Failure(format!("cannot write to stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|config| {
        let outcome = execute(&config)?;
        emit(&config, &outcome.report)?;
        for line in &outcome.diagnostics {
            eprintln!("{line}");
        }
        match outcome.failure {
            Some(msg) => Err(CliError::Failure(format!("consistency failure: {msg}"))),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hypercubic: {e}");
            e.exit_code()
        }
    }
}
