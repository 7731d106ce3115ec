//! File formats, acceptance checks and the command-line front end for
//! `surfsym-core`.

pub mod cli;
pub mod criteria;
pub mod report;
pub mod schema;

pub use schema::SCHEMA_VERSION;

/// Exit status for a run whose checks all passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status when at least one check failed its tolerance.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for bad flags or unreadable input.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when a numerical routine failed outright.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Numeric(#[from] surfsym_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        }
    }
}
