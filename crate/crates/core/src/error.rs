use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("zero or non-invertible leading coefficient")]
    NotInvertible,
    #[error("exponent lattice denominator {0} exceeds the configured maximum {1}")]
    LatticeOverflow(u64, u64),
    #[error("coefficient ring cannot represent {0} exactly")]
    Inexact(String),
    #[error("precision starvation: {0}")]
    PrecisionStarvation(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailBound { bound: f64, tol: f64 },
    #[error("out of contract: {0}")]
    OutOfContract(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
