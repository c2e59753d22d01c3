use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not inside the open unit ball (norm {norm})")]
    OutsideBall { norm: f64 },

    #[error("points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bracket search did not find a feasible level after {doublings} doublings")]
    BracketSearch { doublings: u32 },

    #[error("sequence term {index} is within {gap:e} of the unit circle (limit 1e-15)")]
    Underflow { index: usize, gap: f64 },

    #[error("unknown sequence '{name}'; known: {known}")]
    UnknownSequence { name: String, known: String },

    #[error("construction needs more than {max_len} coefficients; reached {achieved} of {requested} checkpoints")]
    TruncationExceeded {
        max_len: usize,
        achieved: usize,
        requested: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
