use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Probability mass near the lattice edge exceeded the leak threshold.
    #[error("lattice overflow: edge mass {edge_mass:e} exceeds {threshold:e}")]
    LatticeOverflow { edge_mass: f64, threshold: f64 },

    #[error("resource exhausted: {0}")]
    ResourceExhausted(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
