use thiserror::Error;

/// Errors raised by the jet engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("base dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("fiber dimension mismatch: expected {expected}, found {found}")]
    FiberMismatch { expected: usize, found: usize },

    #[error("insufficient order for {what}: need {needed}, have {available}")]
    InsufficientOrder {
        what: String,
        needed: usize,
        available: usize,
    },

    #[error("inner series {index} has a nonzero constant term")]
    NonzeroConstantTerm { index: usize },

    #[error("singular {0}")]
    Singular(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("slot group mixes index ranges: {0}")]
    MixedSlotRange(String),

    #[error("valence mismatch: {0}")]
    ValenceMismatch(String),

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("reduced data is not in the admissible subspace ({stage}, first failing order {order})")]
    NotMember { stage: String, order: usize },

    #[error("line {line}: {path}: {message}")]
    Format {
        line: usize,
        path: String,
        message: String,
    },

    #[error("linear system is rank deficient: rank {rank} < {unknowns} unknowns")]
    RankDeficient { rank: usize, unknowns: usize },
}

pub type Result<T> = std::result::Result<T, JetError>;
