use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("outside the domain: {0}")]
    OutOfDomain(String),
    #[error("quadrature did not converge (error estimate {error:e} after {evaluations} evaluations)")]
    Quadrature { error: f64, evaluations: usize },
    #[error("positivity floor breached: value {value:e} at coordinate {coord}")]
    Positivity { value: f64, coord: f64 },
    #[error("spectral truncation insufficient: tail estimate {tail:e}")]
    Truncation { tail: f64 },
    #[error("stability condition violated: {0}")]
    Stability(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
