//! Command-line front end: configuration, dispatch, and file exports.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! failure, 4 degenerate classification.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;

pub use args::{Cli, Command};
pub use config::{BoxSpec, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("degenerate classification: {0}")]
    Degenerate(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Degenerate(_) => 4,
        }
    }
}

impl From<marangoni::Error> for CliError {
    fn from(e: marangoni::Error) -> Self {
        match e {
            marangoni::Error::InvalidInput(_) => CliError::Config(e.to_string()),
            marangoni::Error::Shape(_) => CliError::Degenerate(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parses `argv`, runs the command, and returns the process exit code.
/// Diagnostics go to stderr.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("marangoni: {e}");
            e.exit_code()
        }
    }
}

/// Resolves the configuration, runs the command, and writes `run.json`.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config = cli.common.resolve()?;
    let start = Instant::now();
    let mut sink = output::Sink::new(&config.output_dir)?;
    let result = commands::dispatch(&cli.command, &config, &cli.common, &mut sink);
    let status = match &result {
        Ok(()) => "ok".to_string(),
        Err(e) => e.to_string(),
    };
    sink.sidecar(&cli.command, &config, &status, start.elapsed().as_secs_f64())?;
    result
}
