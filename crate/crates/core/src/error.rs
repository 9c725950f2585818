use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group descriptor: {0}")]
    InvalidGroup(String),

    #[error("grids are not a dual pair: {0}")]
    GridMismatch(String),

    #[error("band limit violated: {0}")]
    BandViolation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("symbol is tabulated only; asymptotic operations need a closure-backed symbol")]
    TabulatedOnly,

    #[error("empty member set for filter base `{base}` at scale {scale}")]
    EmptyMemberSet { base: String, scale: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
