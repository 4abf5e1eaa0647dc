use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("input error: {0}")]
    Input(String),
    /// The requested operation is not defined for this space family.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An iterative method stopped before reaching its tolerance.
    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },
    /// A numerical kernel returned an inconsistent state.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
