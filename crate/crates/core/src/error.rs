use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions {rows}x{cols}: both must be positive")]
    Dimension { rows: usize, cols: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("moment order {q} is outside the supported range 1..={max}")]
    Range { q: usize, max: usize },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("table line {line}: {message}")]
    Table { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
