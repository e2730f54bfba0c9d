use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("triangle found: ({0}, {1}, {2})")]
    TriangleFound(usize, usize, usize),

    #[error("rejection budget exhausted after {attempts} attempts")]
    RejectionBudget { attempts: usize },

    #[error("state space too large: {what} = {value} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("density must be strictly positive on the support (state index {0})")]
    NonPositiveDensity(usize),

    #[error("pinning has zero mass under {0}")]
    ZeroMassPinning(&'static str),

    #[error("vacuous bound: {0}")]
    VacuousBound(String),

    #[error("window of {window} points exceeds series of length {len}")]
    WindowTooLarge { window: usize, len: usize },

    #[error("empty window after discarding burn-in")]
    EmptyWindow,

    #[error("mismatched supports or dimensions: {0}")]
    Mismatch(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
