use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not surjective (rank {rank} < rows {rows})")]
    NotSurjective { rank: usize, rows: usize },

    #[error("not a complex: d_out . d_in != 0 at entry ({row}, {col})")]
    NotAComplex { row: usize, col: usize },

    #[error("linear system has no solution")]
    NoSolution,

    #[error("composition slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },

    #[error("arity {arity} exceeds the operad window {window}")]
    WindowExceeded { arity: usize, window: usize },

    #[error("operad has no unitary multiplication")]
    NoMultiplication,

    #[error("operad carries no restriction operations")]
    NoLambdaStructure,

    #[error("Kan-like condition fails at pair ({i}, {j})")]
    KanConditionViolated { i: usize, j: usize },

    #[error("invalid structure: {0}")]
    Invalid(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("cohomological hypothesis violated: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
