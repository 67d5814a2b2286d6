use thiserror::Error;

use crate::ldim::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid transfer function: {0}")]
    InvalidTransferFunction(String),

    #[error("transfer function is singular at omega = {omega}")]
    Singular { omega: f64 },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("model failed validation:\n{0}")]
    Validation(ValidationReport),

    #[error("closed loop is not stable (spectral radius {spectral_radius:.6})")]
    Unstable { spectral_radius: f64 },

    #[error("Lyapunov iteration did not converge after {iterations} doublings")]
    Lyapunov { iterations: usize },

    #[error("series of length {len} is too short for max lag {max_lag} (need more than {})", 10 * max_lag)]
    SeriesTooShort { len: usize, max_lag: usize },

    #[error("covariance source provides lags up to {available}, {requested} requested")]
    LagOutOfRange { requested: usize, available: usize },

    #[error("invalid regressor specification: {0}")]
    InvalidSpec(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
