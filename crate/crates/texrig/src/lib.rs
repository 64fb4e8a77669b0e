//! Command-line surface of the texel rigging pipeline: run configuration,
//! camera lists, PNG and container I/O, and the subcommands themselves.

use std::path::PathBuf;

pub mod cameras;
pub mod cli;
pub mod commands;
pub mod config;
pub mod files;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("{}: {}", .0.display(), .1)]
    MissingPath(PathBuf, String),

    #[error("image {}: {}", .0.display(), .1)]
    Image(PathBuf, String),

    #[error("failing checks: {}", .0.join(", "))]
    ValidationFailed(Vec<String>),

    #[error(transparent)]
    Core(#[from] texrig_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) => EXIT_USAGE,
            CliError::MissingPath(..) | CliError::Image(..) => EXIT_DATA,
            CliError::ValidationFailed(_) => EXIT_NUMERIC,
            CliError::Core(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Core(_) => EXIT_DATA,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}
