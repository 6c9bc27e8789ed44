use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular (pivot {pivot:.3e} below tolerance {tolerance:.3e})")]
    Singular { pivot: f64, tolerance: f64 },

    #[error("matrix is rank deficient at column {column} (|R_kk| = {value:.3e})")]
    RankDeficient { column: usize, value: f64 },

    #[error("empty vector")]
    EmptyVector,

    #[error("unsupported constellation order {0}; expected 4, 16 or 64")]
    UnsupportedOrder(usize),

    #[error("expected {expected} bits, got {actual}")]
    WrongBitCount { expected: usize, actual: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("perturbation vector has odd length {0}")]
    OddLength(usize),

    #[error("precoded vector is identically zero")]
    ZeroObjective,

    #[error("search space of {size} candidates exceeds cap {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
