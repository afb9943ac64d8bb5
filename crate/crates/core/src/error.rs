use thiserror::Error;

use crate::tensors::SparseState;

#[derive(Debug, Error)]
pub enum Error {
    #[error("party count mismatch: {0} vs {1}")]
    PartyCountMismatch(usize, usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("index {index:?} out of range for local dims {dims:?}")]
    IndexOutOfRange { index: Vec<usize>, dims: Vec<usize> },

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("operation requires a nonzero state")]
    ZeroState,

    #[error("state is not invariant under party exchange")]
    NotSymmetric,

    #[error("monomial {0:?} is outside the supported shape (one repeated variable times distinct variables)")]
    UnsupportedShape(Vec<u32>),

    #[error("monomial {0:?} is not squarefree")]
    NotSquarefree(Vec<u32>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("verification failed for {what} (residual {residual:e})")]
    Verification { what: String, residual: f64 },

    #[error("elimination did not terminate within {passes} passes")]
    NonTermination {
        passes: usize,
        residual: Box<SparseState>,
    },

    #[error("matrix is singular")]
    Singular,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
