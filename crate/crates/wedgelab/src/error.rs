use thiserror::Error;

/// Failure modes shared across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes, ranks, leg indices or words that do not fit together.
    #[error("structural error: {0}")]
    Structural(String),
    /// Arguments outside the region where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The input carries no data where the operation needs it (e.g. strip values of a real-line function).
    #[error("insufficient domain: {0}")]
    InsufficientDomain(String),
    #[error("parameter `{field}` out of range: {reason}")]
    Parameter { field: String, reason: String },
    #[error("precondition `{what}` violated (residual {residual:.3e})")]
    Precondition { what: String, residual: f64 },
    #[error("numerical failure in {what} (achieved accuracy {achieved:.3e})")]
    Numerical { what: String, achieved: f64 },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter { field: field.into(), reason: reason.into() }
    }
}
