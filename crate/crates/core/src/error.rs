use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
///
/// The `Display` strings are part of the command-line contract: the CLI
/// surfaces them verbatim in the `error` field of its result document.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input")]
    NonFinite,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("not PSD (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("not positive definite")]
    NotPositiveDefinite,
    #[error("singular")]
    Singular,
    #[error("log domain (norm of v - I is {0})")]
    LogDomain(f64),
    #[error("not idempotent (defect {0:e})")]
    NotIdempotent(f64),
    #[error("not an orthogonal projection (defect {0:e})")]
    NotOrthProjection(f64),
    #[error("not a symmetry (defect {0:e})")]
    NotSymmetry(f64),
    #[error("not in Q_p")]
    NotInQp,
    #[error("not a-selfadjoint")]
    NotASelfadjoint,
    #[error("not tangent")]
    NotTangent,
    #[error("too far (distance {0})")]
    TooFar(f64),
    #[error("h too large (norm {0})")]
    HTooLarge(f64),
    #[error("no convergence after {0} terms")]
    NoConvergence(usize),
    #[error("hypotheses violated: {0}")]
    HypothesesViolated(&'static str),
    #[error("postcondition {name} failed: {value:e} > {tolerance:e}")]
    Postcondition {
        name: String,
        value: f64,
        tolerance: f64,
    },
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("non-finite entry at index {0}")]
    NonFiniteEntry(usize),
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
