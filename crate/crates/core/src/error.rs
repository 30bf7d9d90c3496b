use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("step size underflow at t = {t:.6e} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("non-finite state at t = {t:.6e}")]
    NonFinite { t: f64 },

    #[error("boundary mass {fraction:.3e} exceeds the hard limit {limit:.3e} at t = {t:.6e}")]
    TailSpill { t: f64, fraction: f64, limit: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("norm record is missing partition time t = {0:.6e}")]
    MissingPartitionSample(f64),

    #[error("config error at line {line}, column {column}: {message}")]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        name,
        reason: reason.into(),
    }
}
