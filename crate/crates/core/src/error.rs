use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole of the gamma function at {0}")]
    Pole(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("branch cut crossed: {0}")]
    Branch(String),

    #[error("point outside the admissible tube: {0}")]
    TubeViolation(String),

    #[error("kernel not resolved on the grid: {0}")]
    Resolution(String),

    #[error("regression failed: {0}")]
    Fit(String),

    #[error("quadrature refinement inconclusive: {0}")]
    Quadrature(String),

    #[error("finite-difference stencil invalid: {0}")]
    Stencil(String),

    #[error("matrix is ill-conditioned: {0}")]
    Conditioning(String),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
