//! `subfact`: command-line access to sequences, periods, lifting, prime
//! scans, diophantine solvers and the acceptance suite.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 domain error,
//! 4 invariant violation or failed verification.

mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use commands::Cli;

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(subfact::Error),
    /// A check failed; the report has already been printed.
    Failed(String),
    /// The reader closed stdout, e.g. `subfact ... | head`.
    BrokenPipe,
}

impl From<subfact::Error> for CliError {
    fn from(e: subfact::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            CliError::BrokenPipe
        } else {
            CliError::Lib(e.into())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::BrokenPipe => 0,
            CliError::Usage(_) => 2,
            CliError::Lib(subfact::Error::Domain(_)) => 3,
            CliError::Lib(subfact::Error::Invariant(_)) | CliError::Failed(_) => 4,
            CliError::Lib(subfact::Error::Io(_)) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Failed(m) => write!(f, "{m}"),
            CliError::BrokenPipe => write!(f, "output closed"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version to stdout (exit 0) and errors to stderr (exit 2).
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("subfact: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
