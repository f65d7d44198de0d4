use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid physical or structural configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside its allowed range.
    #[error("range error: {0}")]
    Range(String),

    /// Caller broke an operation contract (dimension mismatch, zero vector, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Norm drifted past the configured tolerance during time evolution.
    #[error("numerical failure at t = {time}: norm drift {drift:.3e} exceeds tolerance {tolerance:.3e}")]
    NormDrift { time: f64, drift: f64, tolerance: f64 },

    /// Problem too large for a dense or test-scale routine.
    #[error("capability error: {0}")]
    Capability(String),

    #[error("phase undefined: |C_{index}| = {modulus:.3e} is below the cutoff")]
    UndefinedPhase { index: usize, modulus: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
