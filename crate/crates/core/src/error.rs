use thiserror::Error;

/// Errors raised by the construction and measurement routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial has repeated roots (gcd with its derivative has degree {0})")]
    NonSquareFree(usize),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid order basis: {0}")]
    InvalidOrder(String),

    #[error("singular basis: |det| = {det:e} below threshold {threshold:e}")]
    SingularBasis { det: f64, threshold: f64 },

    #[error("region too large: about {predicted:.0} candidate points exceeds cap {cap}")]
    RegionTooLarge { predicted: f64, cap: u64 },

    #[error("dimension {n} too large (limit {limit})")]
    DimensionTooLarge { n: usize, limit: usize },

    #[error("map is not unimodular: det = {0}")]
    NotUnimodular(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("window has zero volume")]
    ZeroVolumeWindow,

    #[error("support of the test function reaches radius {needed}, data is complete only to {valid}")]
    IncompleteSupport { needed: f64, valid: f64 },

    #[error("truncation valid to radius {valid_radius} cannot resolve distances below {floor}")]
    InsufficientTruncation { valid_radius: f64, floor: f64 },

    #[error("lift with internal coordinates {point:?} lies within {tolerance} of the window boundary")]
    BoundaryHit { point: Vec<f64>, tolerance: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error("malformed {kind} at line {line}: {message}")]
    Parse { kind: &'static str, line: usize, message: String },

    #[error("i/o: {0}")]
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

pub type Result<T> = std::result::Result<T, Error>;
