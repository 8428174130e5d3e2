use thiserror::Error;

/// Errors produced by construction and evaluation routines in this crate.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Operator or vector dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An input value is unusable (non-finite, zero norm, ...).
    #[error("invalid input: {0}")]
    Input(String),
}

impl CoreError {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        CoreError::Parameter(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        CoreError::Dimension(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        CoreError::Input(msg.into())
    }
}
