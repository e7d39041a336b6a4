use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed stream: {0}")]
    Malformed(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no admissible tuple within dmax = {0}")]
    NoTupleWithin(i64),
    #[error("degree {degree} exceeds the cap {cap}")]
    DegreeOverflow { degree: u32, cap: u32 },
    #[error("M1 not positive definite")]
    NotPositiveDefinite,
    #[error("iteration did not converge within budget: {0}")]
    NoConvergence(String),
    #[error("condition ({0}) violated")]
    ConditionViolated(&'static str),
    #[error("inequality not satisfied: margin {0}")]
    InequalityNotSatisfied(String),
    #[error("side condition failed: {0}")]
    SideCondition(String),
    #[error("gate violated: {0}")]
    GateViolated(String),
    #[error("marginal verification missing")]
    MarginalVerificationMissing,
    #[error("tuple not admissible")]
    NotAdmissible,
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("certificate not verified")]
    Unverified,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
