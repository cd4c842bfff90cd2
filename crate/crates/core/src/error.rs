use thiserror::Error;

use crate::lattice::Point;

pub type Result<T> = std::result::Result<T, FppError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FppError {
    #[error("{0} lies outside the computation domain")]
    OutOfDomain(Point),

    #[error("edge {0} lies outside the weight field's box")]
    EdgeOutOfDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument of the origin is undefined")]
    UndefinedArgument,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("sector arc on line {line} is empty inside the box")]
    InsufficientBox { line: i32 },

    #[error("path does not meet line {0}")]
    RangeError(i32),

    #[error("busemann estimate did not converge at this scale")]
    Unconverged,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl From<std::io::Error> for FppError {
    fn from(e: std::io::Error) -> Self {
        FppError::Io(e.to_string())
    }
}
