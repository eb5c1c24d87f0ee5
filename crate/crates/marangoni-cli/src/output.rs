//! Output directory bookkeeping. Data files carry no run metadata; that
//! goes to `run.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::Command;
use crate::config::RunConfig;
use crate::CliError;

pub struct Sink {
    dir: PathBuf,
    written: Vec<String>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a Command,
    config: &'a RunConfig,
    outputs: &'a [String],
    status: &'a str,
    elapsed_seconds: f64,
}

impl Sink {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Sink {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        body.push('\n');
        self.text(name, &body)
    }

    /// CSV from a header line and preformatted rows.
    pub fn csv<I: IntoIterator<Item = String>>(&mut self, name: &str, header: &str, rows: I) -> Result<(), CliError> {
        let mut body = String::from(header);
        body.push('\n');
        for r in rows {
            body.push_str(&r);
            body.push('\n');
        }
        self.text(name, &body)
    }

    pub fn sidecar(&mut self, command: &Command, config: &RunConfig, status: &str, elapsed: f64) -> Result<(), CliError> {
        let outputs = self.written.clone();
        self.json(
            "run.json",
            &Sidecar {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command,
                config,
                outputs: &outputs,
                status,
                elapsed_seconds: elapsed,
            },
        )
    }
}

/// Fixed-width scientific notation used in every CSV.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}
