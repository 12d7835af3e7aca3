use thiserror::Error;

/// Errors produced by the optimizer library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid bounds at dimension {index}: lower {lower} must be < upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },

    #[error("population too small: need at least 2 bats, got {0}")]
    PopulationTooSmall(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown objective `{0}`")]
    UnknownObjective(String),

    #[error("objective `{0}` has a fixed dimension; no dimension argument allowed")]
    FixedDimension(String),

    #[error("point outside bounds at dimension {index}: {value} not in [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("non-finite fitness {value} from objective `{objective}` at iteration {iteration}, bat {bat}")]
    NonFiniteFitness {
        objective: String,
        iteration: usize,
        bat: usize,
        value: f64,
    },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("negative diversity value {value} at index {index}")]
    NegativeDiversity { index: usize, value: f64 },

    #[error("invalid cost matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("brute force limited to n <= {limit} (got n = {n}); use optimize_assignment for larger problems")]
    TooLargeForBruteForce { n: usize, limit: usize },

    #[error("invalid call breakdown: {0}")]
    InvalidBreakdown(String),
}

pub type Result<T> = std::result::Result<T, Error>;
