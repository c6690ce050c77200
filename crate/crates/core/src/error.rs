use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{a} has no inverse modulo {m}")]
    NotInvertible { a: i64, m: u64 },

    #[error("arguments are not coprime: gcd({a}, {b}) > 1")]
    NotCoprime { a: i64, b: i64 },

    #[error("index {index} out of range 1..={len}")]
    OutOfRange { index: u64, len: u64 },

    #[error("moduli set is empty: {0}")]
    EmptySet(String),

    #[error("capacity exceeded: {needed} Farey points requested, limit is {limit}")]
    CapacityExceeded { needed: u64, limit: u64 },

    #[error("invalid window half-width {0}; expected 0 < delta <= 1/2")]
    InvalidDelta(f64),

    #[error("parameters outside the admissible regime: {0}")]
    InvalidRegime(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tol:e} within {budget} panels")]
    QuadratureFailure { tol: f64, budget: usize },

    #[error("{path}:{line}: {msg}")]
    FileFormat {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
