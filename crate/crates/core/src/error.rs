use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid word {word}: symbol {symbol} outside 1..={n_maps}")]
    InvalidWord { word: String, symbol: usize, n_maps: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid antichain: {0}")]
    InvalidAntichain(String),

    #[error("weight {index} gives w*s^r = {value}, which is not below 1")]
    NonContractiveMoment { index: usize, value: f64 },

    #[error("moment equation has no root below {limit}")]
    NoRoot { limit: f64 },

    #[error("root bracket collapsed with residual {residual:e} above tolerance {tol:e}")]
    SolverStalled { residual: f64, tol: f64 },

    #[error("word budget of {budget} exceeded after {count} words")]
    BudgetExceeded { budget: usize, count: usize },

    #[error("uniform weight vector gives a zero regime threshold")]
    ZeroThreshold,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient resolution: {qualifying} usable entries, need {needed}")]
    InsufficientResolution { qualifying: usize, needed: usize },

    #[error("OSC is neither verified nor asserted for this system")]
    OscUnknown,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
