// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::io::Write;
use std::path::Path;

use qudit_teleport::Error;

#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or values; exit code 2.
    Config(String),
    /// One or more checks failed after the report was written; exit code 1.
    ChecksFailed(usize),
    Library(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Library(e) if is_config_error(e) => 2,
            _ => 1,
        }
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidConfig(_) | Error::InvalidDimension { .. } | Error::Parse { .. } | Error::DimensionMismatch { .. }
    )
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::ChecksFailed(n) => write!(f, "{n} check(s) failed"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Header, records, and the `key=value` pairs of the trailing config line.
pub struct Table {
    header: &'static str,
    records: Vec<String>,
    config: Vec<(&'static str, String)>,
}

impl Table {
    pub fn new(header: &'static str, command: &str) -> Self {
        Self {
            header,
            records: Vec::new(),
            config: vec![("command", command.to_string())],
        }
    }

    pub fn push(&mut self, record: String) {
        self.records.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = String>) {
        self.records.extend(records);
    }

    pub fn config(&mut self, key: &'static str, value: impl ToString) -> &mut Self {
        self.config.push((key, value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::with_capacity(64 * (self.records.len() + 2));
        s.push_str(self.header);
        s.push('\n');
        for r in &self.records {
            s.push_str(r);
            s.push('\n');
        }
        s.push_str("# config");
        for (k, v) in &self.config {
            s.push_str(&format!(" {k}={v}"));
        }
        s.push('\n');
        s
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
