//! Sparse multipartite tensors with exact rational or complex amplitudes,
//! local operators and structural operations.

mod flatten;
mod matrix;
mod ops;
mod scalar;
mod state;

pub use flatten::{
    exact_rank, flattening_rank, flattening_rank_with_threshold, numerical_rank, DEFAULT_RANK_THRESHOLD,
};
pub use matrix::Matrix;
pub use ops::{
    apply_local, apply_local_with_chop, direct_sum, equal_up_to_scale, factor_permutation_map,
    factor_permutation_matrix, invert_permutation, merge_parties, permute_local_factors, permute_parties,
    tensor_power, tensor_product, FuseMode, LocalOperatorSet, ScaleMatch, DEFAULT_CHOP,
};
pub(crate) use scalar::rational_to_f64;
pub use scalar::{Scalar, ScalarRepr};
pub use state::{MultiIndex, SparseState};
