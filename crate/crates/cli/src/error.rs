use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced to the shell. Each maps to a stable exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{}: malformed JSON at line {line}, column {column}: {message}", path.display())]
    Json { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{}: {field}: {message}", path.display())]
    Spec { path: PathBuf, field: String, message: String },
    #[error(transparent)]
    Domain(#[from] qgame_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Write { .. } | CliError::Json { .. } => 2,
            CliError::Spec { .. } => 3,
            CliError::Domain(_) => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
