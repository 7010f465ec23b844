use thiserror::Error;

/// Errors raised by tensor construction, products, decompositions and I/O.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("invalid shape {0:?}: order and every extent must be at least 1")]
    InvalidShape(Vec<usize>),

    #[error("data length {got} does not match shape {shape:?} (expected {expected})")]
    DataLength {
        shape: Vec<usize>,
        expected: usize,
        got: usize,
    },

    #[error("index {index:?} out of range for shape {shape:?}")]
    IndexOutOfRange { index: Vec<usize>, shape: Vec<usize> },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("tensor of shape {0:?} is not hypercubic")]
    NotHypercubic(Vec<usize>),

    #[error("order {0} is not even")]
    OddOrder(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid contraction spec: {0}")]
    InvalidSpec(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("Singular: pivot {pivot:e} below threshold {threshold:e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("input is not symmetric (max violation {0:e})")]
    NotSymmetric(f64),

    #[error("input is not antisymmetric (max violation {0:e})")]
    InputNotAntisymmetric(f64),

    #[error("size guard exceeded: {0}")]
    TooLarge(String),

    #[error("iteration failed: {0}")]
    NoConvergence(String),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("entry count mismatch: expected {expected}, found {found}")]
    EntryCountMismatch { expected: usize, found: usize },

    #[error("non-finite entry at offset {0}")]
    NonFinite(usize),

    #[error("invalid entry {0:?}")]
    InvalidEntry(String),
}

pub type Result<T> = std::result::Result<T, TensorError>;
