use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

use pseudocone::io::SCHEMA_VERSION;

pub const EXIT_IO: i32 = 3;
pub const EXIT_MALFORMED: i32 = 4;
pub const EXIT_SCHEMA: i32 = 5;
pub const EXIT_PRECONDITION: i32 = 6;
pub const EXIT_NOT_CONVERGED: i32 = 7;
pub const EXIT_RESIDUAL: i32 = 8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: malformed JSON: {source}")]
    Malformed {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error(transparent)]
    Precondition(#[from] pseudocone::Error),
    #[error("solver stopped with status {status} after {iterations} iterations")]
    NotConverged { status: String, iterations: usize },
    #[error("round-trip residual {residual:e} exceeds {threshold:e}")]
    Residual { residual: f64, threshold: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } => EXIT_IO,
            Self::Malformed { .. } => EXIT_MALFORMED,
            Self::Schema { .. } => EXIT_SCHEMA,
            Self::Precondition(_) => EXIT_PRECONDITION,
            Self::NotConverged { .. } => EXIT_NOT_CONVERGED,
            Self::Residual { .. } => EXIT_RESIDUAL,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io { .. } => "io",
            Self::Malformed { .. } => "malformed_json",
            Self::Schema { .. } => "schema",
            Self::Precondition(_) => "precondition",
            Self::NotConverged { .. } => "not_converged",
            Self::Residual { .. } => "residual_exceeded",
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        json!({
            "schema": SCHEMA_VERSION,
            "error": {
                "kind": self.kind(),
                "code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}

pub type CliResult<T> = Result<T, CliError>;
