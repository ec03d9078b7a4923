use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("point is outside the spectrahedron (min eigenvalue {min_eig:.3e})")]
    Outside { min_eig: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("ill-posed feasibility problem: {0}")]
    InvalidProblem(String),
}

impl Error {
    /// True for failures caused by the numbers rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::Numerical(_) | Error::InvalidProblem(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
