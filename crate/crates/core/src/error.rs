use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("zero transmitter-receiver distance in the far-field path-loss model")]
    Singularity,

    #[error(
        "numerical accuracy not reached: {what} (estimate {estimate:e}, error {error:e}, evaluations {evaluations})"
    )]
    Numerical {
        what: &'static str,
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
