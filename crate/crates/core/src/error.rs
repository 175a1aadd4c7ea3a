use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// QR iteration ran out of budget; `partial` holds the eigenvalues that did converge.
    #[error("numerical failure: {message} ({} eigenvalues converged)", partial.len())]
    NumericalFailure {
        message: String,
        partial: Vec<Complex64>,
    },

    #[error("scaling factor undefined: Jacobi operator is nilpotent (x: {x_nilpotent}, y: {y_nilpotent})")]
    NilpotentPair {
        x_nilpotent: bool,
        y_nilpotent: bool,
    },

    #[error("spectrum asymmetry: trace ratio {ratio} is negative at odd power {power} and no even power recovers a positive scale")]
    SpectrumAsymmetry { ratio: f64, power: usize },

    #[error("singular metric at point (|det| = {det:e})")]
    SingularMetric { det: f64 },

    #[error("metric signature at point is ({found_neg},{found_pos}), declared ({declared_neg},{declared_pos})")]
    SignatureMismatch {
        found_neg: usize,
        found_pos: usize,
        declared_neg: usize,
        declared_pos: usize,
    },

    #[error("pseudo-sphere with sign {sign} is empty for signature ({neg},{pos})")]
    EmptyCone { sign: i32, neg: usize, pos: usize },

    #[error(
        "pseudo-sphere sampling exhausted {attempts} attempts after {found} of {requested} samples"
    )]
    SamplingFailure {
        attempts: usize,
        found: usize,
        requested: usize,
    },

    #[error("dimension {0} is not supported by this construction")]
    UnsupportedDimension(usize),

    #[error("projected tangent vector is zero; transfer needs a non-vertical direction")]
    ProjectionNull,

    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
