use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spatial dimension {0} is not supported (expected 1, 2 or 3)")]
    Dimension(usize),

    #[error("basis dimension {requested} exceeds the configured limit {limit}")]
    DimensionLimit { requested: u128, limit: usize },

    #[error("invalid potential: {0}")]
    Potential(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("basis mismatch: expected `{expected}`, found `{found}`")]
    BasisMismatch { expected: String, found: String },

    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("state component leaves the basis: {0}")]
    OutOfBasis(String),

    #[error("operator is not Hermitian (max |A - A^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("propagation did not converge: residual {residual:e} after {substeps} substeps at t = {reached} of {target}")]
    NonConvergence {
        residual: f64,
        substeps: usize,
        reached: f64,
        target: f64,
    },

    #[error("{0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
