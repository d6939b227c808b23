use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("input vectors are linearly dependent (numerical rank {rank} < {count})")]
    DependentInput { rank: usize, count: usize },

    #[error("slice direction e_(d+1) lies in the frame span (|proj e_(d+1)|^2 = {0:.3e})")]
    SliceDegenerate(f64),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dependency tuple has empty support")]
    EmptySupport,

    #[error("invalid range: need 0 <= k < d, got k={k}, d={d}")]
    InvalidRange { k: usize, d: usize },

    #[error("tuple is not an affine dependency of the assigned points (residual {0:.3e})")]
    NotADependency(f64),

    #[error("set {0} is not met by the flat")]
    NotATransversal(usize),

    #[error("sets {0} and {1} intersect")]
    NotDisjoint(usize, usize),

    #[error("family too large for exhaustive search: {n} > {max}")]
    TooLarge { n: usize, max: usize },

    #[error("generator gave up after {0} rejections")]
    GenerationTimeout(usize),

    #[error("every projected set contains the origin; the frame already yields a transversal")]
    AllProjectionsContainOrigin,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("cannot draw a {0}-dimensional scene without a projection plane")]
    UnsupportedDimension(usize),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
