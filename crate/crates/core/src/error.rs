use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("coefficient row ({i},{k}) sums to {sum}, expected 1")]
    RowSum { i: usize, k: usize, sum: f64 },

    #[error("coefficient row ({i},{k}) has a negative entry {value}")]
    NegativeCoefficient { i: usize, k: usize, value: f64 },

    #[error("coefficient row ({i},{k}) has a zero {block} block, so the normalized operator leaves the simplex")]
    DegenerateRow {
        i: usize,
        k: usize,
        block: &'static str,
    },

    #[error("annihilated state at step {step}: a block sum is not positive")]
    Annihilated { step: usize },

    #[error("state is not on the punctured simplex: {0}")]
    NotOnSimplex(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("tensor file, line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
