use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("insufficient degrees of freedom: n = {n} < p = {p}")]
    InsufficientDof { n: usize, p: usize },
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("mcmc failure: {0}")]
    Mcmc(String),
}

impl Error {
    /// Process exit code used by the command line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidDimension(_)
            | Error::InsufficientDof { .. }
            | Error::CapacityExceeded(_)
            | Error::Domain(_) => 2,
            Error::Numerical(_) | Error::Mcmc(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
