use thiserror::Error;

pub type Result<T, E = OpucError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpucError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Working precision was not enough to keep the computation meaningful.
    #[error("precision exhausted at index {index}: {detail}")]
    Precision { index: usize, detail: String },

    /// The moment Toeplitz matrix stopped being positive definite.
    #[error("moment sequence is not positive definite at order {order}")]
    Degenerate { order: usize },

    /// Quadrature grid cannot resolve the requested moments.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A construction left the representable integer range.
    #[error("range error: {detail} (largest feasible index {max_feasible})")]
    Range { detail: String, max_feasible: usize },
}

impl OpucError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        OpucError::Domain(msg.into())
    }
}
