use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid physical constants: {0}")]
    Constants(String),
    #[error("invalid quantum numbers: {0}")]
    QuantumNumbers(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("argument out of supported range: {0}")]
    Domain(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("no usable points after node masking")]
    EmptyMask,
    #[error("phase unwrap failed at index {0}: amplitude below mask threshold")]
    Unwrap(usize),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
