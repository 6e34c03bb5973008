mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{normalize_argv, Cli};

/// Why a command stopped without a verdict.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: unreadable file, malformed formula or structure, wrong
    /// language. Exit code 2.
    Usage(String),
    /// Search or enumeration budget exhausted. Exit code 3.
    Resource(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize_argv(std::env::args())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
