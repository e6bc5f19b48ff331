use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A probability vector failed validation.
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    /// Two objects that must live on the same state space or depth disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An argument was outside its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The operation needs stationary or time-varying dynamics.
    #[error("operation requires Markov dynamics: {0}")]
    RequiresMarkov(String),

    /// A sequence of gambles violated the required pointwise ordering.
    #[error("sequence not monotone at step {step}: violation {violation:e}")]
    NotMonotone { step: usize, violation: f64 },

    /// A path argument is shorter than the construction needs.
    #[error("path too short: need length {need}, got {got}")]
    PathTooShort { need: usize, got: usize },

    /// A container had the wrong number of entries.
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    /// The linear programming solver failed.
    #[error("lp solver failed: {0}")]
    Solver(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A selection failed the almost-desirability check.
    #[error("selection not almost desirable at situation `{situation}`: lower expectation {value:e}")]
    NotAlmostDesirable { situation: String, value: f64 },

    /// Input text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// An input file has the right shape but inconsistent content.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
