mod args;
mod commands;
mod output;

use args::{Cli, Command};
use clap::Parser;
use output::{emit, render};
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or cross-section.
    Usage(String),
    /// Unreadable or malformed input, or an unwritable output file.
    File(String),
    /// A check did not pass.
    Failed(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::File(_) => 3,
            CliError::Failed(_) | CliError::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::File(m) | CliError::Failed(m) | CliError::Internal(m) => m,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Roots { geometry, j_max, window, out } => {
            let r = commands::roots(&geometry, j_max, window)?;
            emit(&render(&r, out.format)?, out.out.as_deref())
        }
        Command::Gap { geometry, j_max, out } => {
            let r = commands::gap(&geometry, j_max)?;
            emit(&render(&r, out.format)?, out.out.as_deref())
        }
        Command::Ks { hyperbolic, out } => {
            let geometry = args::GeometryArgs::hyperbolic_only(hyperbolic);
            let r = commands::ks(&geometry)?;
            emit(&render(&r, out.format)?, out.out.as_deref())
        }
        Command::Lens { lens, j_max, out } => {
            let r = commands::lens(lens, j_max)?;
            emit(&render(&r, out.format)?, out.out.as_deref())
        }
        Command::Verify { suite, n, seed, eps, j_max, torus, out } => {
            let params = commands::VerifyParams { n, seed, eps, j_max, lattice: torus };
            let r = commands::verify(suite, &params)?;
            emit(&render(&r, out.format)?, out.out.as_deref())?;
            let failed = commands::failures(&r.rows);
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Failed(failed.join("\n")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
