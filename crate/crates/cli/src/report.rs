use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use divpop_core::Error;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Affirmative = 0,
    Failure = 1,
    Negative = 2,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    /// SHA-256 of every file read, keyed by path.
    pub inputs: BTreeMap<String, String>,
    pub result: Value,
    pub duration_ms: u128,
    pub exit_status: i32,
}

/// What a command hands back: the payload, its exit class and a few lines
/// for `--human`.
pub struct Finding {
    pub result: Value,
    pub exit: Exit,
    pub summary: Vec<String>,
}

impl Finding {
    pub fn new(result: Value, exit: Exit, summary: Vec<String>) -> Self {
        Finding {
            result,
            exit,
            summary,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io { path: String, message: String },
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// Reads input files and remembers their digests.
#[derive(Default)]
pub struct Inputs {
    pub digests: BTreeMap<String, String>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let shown = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|e| CliError::Io {
            path: shown.clone(),
            message: e.to_string(),
        })?;
        self.digests
            .insert(shown.clone(), hex::encode(Sha256::digest(&bytes)));
        String::from_utf8(bytes).map_err(|e| CliError::Io {
            path: shown,
            message: e.to_string(),
        })
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
