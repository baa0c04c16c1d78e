//! Errors, exit codes and writers for JSON and CSV.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use gluevar_core::BoundError;
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_UNSUPPORTED: u8 = 3;
pub const EXIT_NO_WITNESS: u8 = 4;

/// A failure reported as JSON on stderr with a matching exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub body: Value,
}

impl CliError {
    pub fn new(code: u8, kind: &str, message: impl Into<String>) -> CliError {
        CliError {
            code,
            body: json!({ "error": kind, "message": message.into() }),
        }
    }

    pub fn invalid(message: impl Into<String>) -> CliError {
        CliError::new(EXIT_INVALID_INPUT, "invalid-input", message)
    }

    pub fn io(path: &Path, e: io::Error) -> CliError {
        CliError::new(EXIT_INVALID_INPUT, "io", format!("{}: {e}", path.display()))
    }

    pub fn with(mut self, key: &str, value: Value) -> CliError {
        self.body[key] = value;
        self
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> CliError {
        match e {
            BoundError::UnsupportedRegime { alpha, beta } => {
                CliError::new(EXIT_UNSUPPORTED, "unsupported-regime", e.to_string())
                    .with("alpha", json!(alpha))
                    .with("beta", json!(beta))
            }
            BoundError::WitnessMismatch { residual } => {
                CliError::new(EXIT_VERIFY_FAILED, "witness-mismatch", e.to_string()).with("residual", json!(residual))
            }
            BoundError::InvalidSpec(_) | BoundError::WrongClass { .. } | BoundError::Distortion(_) => {
                CliError::invalid(e.to_string())
            }
        }
    }
}

pub fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("output is serializable");
    let mut out = io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("output is serializable");
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Comma-separated file with a header row and LF line endings.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
