use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series lengths differ ({min}..={max}); an equal-length dataset is required")]
    UnequalLengths { min: usize, max: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: file contains no series")]
    EmptyFile { path: PathBuf },

    #[error("no Nemenyi critical value for k={k} at alpha={alpha} (table covers k=2..=30, alpha 0.05 and 0.10)")]
    CriticalValueUnavailable { k: usize, alpha: f64 },

    #[error("row has {present} present cells; at least 2 are needed for ranking")]
    TooFewCells { present: usize },

    #[error("every ensemble member abstained (query length {len} is shorter than all windows)")]
    AllMembersAbstained { len: usize },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
