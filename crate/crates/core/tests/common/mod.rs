#![allow(dead_code)]

use proptest::prelude::*;
use symrank::tensors::{LocalOperatorSet, Matrix, Scalar, SparseState};

pub fn small_rational() -> impl Strategy<Value = Scalar> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Scalar::ratio(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Scalar> {
    small_rational().prop_filter("nonzero", |s| !s.is_zero())
}

/// A rational state with the given local dims and up to `max_terms` entries.
pub fn state_with_dims(dims: Vec<usize>, max_terms: usize) -> impl Strategy<Value = SparseState> {
    let idx = dims.iter().map(|&d| 0..d).collect::<Vec<_>>();
    prop::collection::vec((idx, nonzero_rational()), 1..=max_terms)
        .prop_map(move |entries| SparseState::from_entries(dims.clone(), entries).unwrap())
}

pub fn dims(parties: std::ops::RangeInclusive<usize>, max_dim: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=max_dim, parties)
}

pub fn sparse_state() -> impl Strategy<Value = SparseState> {
    dims(2..=4, 3).prop_flat_map(|d| state_with_dims(d, 8))
}

pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(small_rational(), cols), rows)
        .prop_map(|rows| Matrix::from_rows(rows).unwrap())
}

/// Operators with `rows[p] × s.local_dims()[p]` shapes.
pub fn local_ops(input: Vec<usize>, output: Vec<usize>) -> impl Strategy<Value = LocalOperatorSet> {
    input
        .into_iter()
        .zip(output)
        .map(|(i, o)| matrix(o, i))
        .collect::<Vec<_>>()
        .prop_map(|ops| LocalOperatorSet::new(ops).unwrap())
}

pub fn vector(d: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(small_rational(), d).prop_filter("nonzero vector", |v| v.iter().any(|x| !x.is_zero()))
}
