use thiserror::Error;

/// Errors raised by the spectral, basis and coherent-state routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MorseError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no bound states: nu = {nu} must exceed 1")]
    NoBoundStates { nu: f64 },

    #[error("inconsistent parameter: {0}")]
    Inconsistent(String),

    #[error("quantum pair ({n}, {m}) outside the bound range 0..={k}")]
    OutOfRange { k: u32, n: u32, m: u32 },

    #[error("cannot order levels {first:?} and {second:?}: tied at the supplied precision of p")]
    OrderingAmbiguity {
        first: (u64, u64),
        second: (u64, u64),
    },

    #[error("quadrature did not converge: refinements differ by {difference:e} (limit {limit:e})")]
    Accuracy { difference: f64, limit: f64 },

    #[error("level {index} has {multiplicity} members that are not a swap pair; the single-index basis needs at most doubly degenerate levels")]
    AccidentalLevel { index: usize, multiplicity: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MorseError {
    fn from(err: std::io::Error) -> Self {
        MorseError::Io(err.to_string())
    }
}

impl From<csv::Error> for MorseError {
    fn from(err: csv::Error) -> Self {
        MorseError::Io(err.to_string())
    }
}

impl From<serde_json::Error> for MorseError {
    fn from(err: serde_json::Error) -> Self {
        MorseError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MorseError>;
