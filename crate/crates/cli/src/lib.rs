//! Library side of the `qheat` command-line tool: configuration, figure
//! presets, table output and the validation suite.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;
pub mod validate;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("numerical failure: {0}")]
    Numeric(#[from] qubit_heat::Error),
    #[error("validation failed: {failed} of {total} checks")]
    Validation { failed: usize, total: usize },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Config(_) | CliError::Io { .. } => exit::CONFIG,
            CliError::Numeric(_) | CliError::Validation { .. } => exit::NUMERIC,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
