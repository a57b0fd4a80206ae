//! Error type for the lab crate, with the exit-code classification used by
//! the CLI (0 success, 1 validation failure, 2 runtime error).

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{row}:{column}: {message}")]
    Parse {
        path: PathBuf,
        /// 1-based data row (0 for the header).
        row: usize,
        /// 1-based column.
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] eddpc_core::Error),

    #[error("simulation became infeasible at step {step}")]
    Infeasible { step: usize },

    #[error("{0}")]
    Runtime(String),
}

impl LabError {
    /// Exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Io { .. }
            | LabError::Parse { .. }
            | LabError::Schema { .. }
            | LabError::Config(_)
            | LabError::Core(_) => 1,
            LabError::Infeasible { .. } | LabError::Runtime(_) => 2,
        }
    }
}
