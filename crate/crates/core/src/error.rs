use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("exact division failed: {0}")]
    DivisionFailed(String),
    #[error("variable `{0}` does not occur with positive degree")]
    DegreeTooLow(String),
    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),
    #[error("degree {requested} exceeds cap {cap}")]
    DegreeCapExceeded { requested: usize, cap: usize },
    #[error("component does not split into real and imaginary parts: {0}")]
    ComplexResidue(String),
    #[error("polynomial is not invariant: {0}")]
    NotInvariant(String),
    #[error("non-integral coefficient in {0}")]
    NonIntegral(String),
    #[error("reparametrization rule mismatch: {0}")]
    RuleMismatch(String),
    #[error("singular parameters: {0}")]
    SingularParams(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("root finding failed, residual {0:e}")]
    RootFindingFailed(f64),
    #[error("ill-conditioned roots, minimum gap {0:e}")]
    IllConditioned(f64),
    #[error("no samples produced for {0}")]
    NoSamples(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Either kind of failure, for operations mixing exact and numeric work.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}
