use std::io;

use thiserror::Error;

/// Errors produced by the scheduling toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("missing runtime for instance `{instance}` on solver `{solver}`")]
    MissingPair { instance: String, solver: String },

    #[error("line {line}: duplicate runtime for instance `{instance}` on solver `{solver}`")]
    DuplicatePair {
        line: u64,
        instance: String,
        solver: String,
    },

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),

    #[error("unknown solver `{0}`")]
    UnknownSolver(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schedule does not match the runtime data: {0}")]
    Mismatch(String),

    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    #[error("problem too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
