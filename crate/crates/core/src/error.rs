use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain mismatch: {0}")]
    Domain(String),

    #[error("protocol violation in round {round}: {reason}")]
    Protocol { round: usize, reason: String },

    #[error("witness mislabels round {round}")]
    Witness { round: usize },

    #[error("sample is not realizable: {0}")]
    Realizability(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("comparator set is empty")]
    EmptyComparator,

    #[error("instance too large for exact computation: {what} = {size} exceeds {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
