//! The `⟨d,d,d⟩` matrix multiplication tensor.
//!
//! Party A holds `(i, j)` at index `i·d + j`, B holds `(j, k)` at `j·d + k`
//! and C holds `(k, i)` at `k·d + i`.

use super::product::ProductDecomposition;
use super::witness::ConversionWitness;
use crate::error::{Error, Result};
use crate::tensors::{
    merge_parties, permute_parties, tensor_product, FuseMode, LocalOperatorSet, Matrix, Scalar, SparseState,
};
use crate::wpower::ghz_state;

pub fn matmul_tensor(d: usize) -> Result<SparseState> {
    if d == 0 {
        return Err(Error::InvalidArgument("matrix size must be positive".into()));
    }
    let entries = (0..d).flat_map(|i| {
        (0..d).flat_map(move |j| (0..d).map(move |k| (vec![i * d + j, j * d + k, k * d + i], Scalar::one())))
    });
    SparseState::from_entries(vec![d * d; 3], entries)
}

/// Three EPR pairs shared along the edges AB, BC and CA. Each party fuses
/// its two qubits as A = (AB, CA), B = (AB, BC), C = (BC, CA).
pub fn epr_triangle() -> Result<SparseState> {
    let epr = ghz_state(2, 2)?;
    // parties: A·AB, B·AB, B·BC, C·BC, C·CA, A·CA
    let six = tensor_product(&tensor_product(&epr, &epr, FuseMode::AppendParties)?, &epr, FuseMode::AppendParties)?;
    let grouped = permute_parties(&six, &[0, 5, 1, 2, 3, 4])?;
    let s = merge_parties(&grouped, 0, 2)?;
    let s = merge_parties(&s, 1, 2)?;
    merge_parties(&s, 2, 2)
}

/// `epr_triangle → matmul_tensor(2)`: A's qubits are exchanged, B and C are
/// already in matmul order.
pub fn epr_relabel_witness() -> Result<ConversionWitness> {
    let swap = Matrix::permutation(&[0, 2, 1, 3])?;
    let ops = LocalOperatorSet::new(vec![swap, Matrix::identity(4), Matrix::identity(4)])?;
    ConversionWitness::new(epr_triangle()?, matmul_tensor(2)?, ops)
}

/// Strassen's seven products as an exact rank-7 certificate of
/// `matmul_tensor(2)`.
pub fn strassen_certificate() -> Result<ProductDecomposition> {
    // Index order 11, 12, 21, 22 for A and B. The C vector of M_r carries the
    // coefficient of M_r in C_ik at k·2 + i, i.e. order 11, 21, 12, 22.
    const PRODUCTS: [([i64; 4], [i64; 4], [i64; 4]); 7] = [
        ([1, 0, 0, 1], [1, 0, 0, 1], [1, 0, 0, 1]),
        ([0, 0, 1, 1], [1, 0, 0, 0], [0, 1, 0, -1]),
        ([1, 0, 0, 0], [0, 1, 0, -1], [0, 0, 1, 1]),
        ([0, 0, 0, 1], [-1, 0, 1, 0], [1, 1, 0, 0]),
        ([1, 1, 0, 0], [0, 0, 0, 1], [-1, 0, 1, 0]),
        ([-1, 0, 1, 0], [1, 1, 0, 0], [0, 0, 0, 1]),
        ([0, 1, 0, -1], [0, 0, 1, 1], [1, 0, 0, 0]),
    ];
    let ints = |v: &[i64; 4]| v.iter().map(|&x| Scalar::int(x)).collect::<Vec<_>>();
    let mut cert = ProductDecomposition::new(vec![4; 3]);
    for (a, b, c) in &PRODUCTS {
        cert.push(Scalar::one(), vec![ints(a), ints(b), ints(c)])?;
    }
    cert.verify(&matmul_tensor(2)?, 0.0)?;
    Ok(cert)
}

/// Smallest `n ≥ 1` with `6^n ≥ c · 2^{ω n}`.
pub fn matmul_threshold(omega: f64, c: f64) -> Result<u64> {
    let gap = 6f64.log2() - omega;
    if !(2.0..).contains(&omega) || gap <= 0.0 || !omega.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "omega = {omega} must lie in [2, log2 6) for a finite threshold"
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("constant c = {c} must be positive")));
    }
    Ok((c.log2() / gap).ceil().max(1.0) as u64)
}
