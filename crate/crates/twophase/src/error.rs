use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("eigenvalue collision at s = {s}: gap {gap:e} below tolerance {tol:e}")]
    Collision { s: f64, gap: f64, tol: f64 },
    #[error("branch tracking ambiguous at s = {s}")]
    BranchTracking { s: f64 },
    #[error("quadrature did not converge: estimated error {err:e}")]
    Quadrature { err: f64 },
    #[error("{0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
