use thiserror::Error;

/// Errors raised by the simulator, the protocol runtime and the checkers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("tensor factor {index} out of range for {count} factors")]
    FactorOutOfRange { index: usize, count: usize },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("Kraus completeness violated (max deviation {0:e})")]
    NotComplete(f64),

    #[error("projector set is not complete and orthogonal (max deviation {0:e})")]
    IncompleteProjectors(f64),

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("ket is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid Pauli weights: {0}")]
    InvalidWeights(String),

    #[error("{what} = {value} out of range {min}..={max}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("invalid permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("locality violation: {party} does not own factor(s) {factors:?}")]
    LocalityViolation { party: String, factors: Vec<usize> },

    #[error("nonlocal operation not declared by this protocol")]
    UndeclaredNonlocal,

    #[error("numerical validity check failed: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
