//! Experiment runner for power-residue prime statistics: envelope
//! evaluation, a registry of runnable commands, sweep execution with
//! caching, and persisted records.

pub mod config;
pub mod envelope;
pub mod experiments;
pub mod record;
pub mod sweep;

use std::fmt;
use std::path::Path;

/// Process exit codes per the CLI contract.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug)]
pub enum LabError {
    /// Malformed configuration or parameters; maps to exit code 2.
    Config { context: String, message: String },
    /// Filesystem trouble reading or writing stores.
    Io { path: String, message: String },
}

impl LabError {
    pub fn io(path: &Path, err: std::io::Error) -> LabError {
        LabError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::Config { context, message } => write!(f, "{context}: {message}"),
            LabError::Io { path, message } => write!(f, "{path}: {message}"),
        }
    }
}

impl std::error::Error for LabError {}
