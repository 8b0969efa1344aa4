use thiserror::Error;

/// Errors raised by weight construction, quadrature, kernels and operators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the admissible range of a weight class or operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The hypotheses of a construction are not met by its input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A numerical procedure stopped before reaching its target tolerance.
    #[error("accuracy error in {context}: achieved {achieved:e}, target {target:e}")]
    Accuracy {
        context: String,
        achieved: f64,
        target: f64,
    },

    /// The weight data violates a defining condition of its class.
    #[error("weight class violation: {0}")]
    ClassViolation(String),

    /// A kernel evaluation was requested outside the certified disc.
    #[error("|z| = {modulus} lies outside the certified radius r_max = {r_max}")]
    OutsideRadius { r_max: f64, modulus: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Two independent computational routes disagree.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    /// The request falls into a case for which no representation is known.
    #[error("open problem: {0}")]
    OpenProblem(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
