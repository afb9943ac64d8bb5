use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensors::{flattening_rank, Scalar, SparseState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class222 {
    /// `Δ ≠ 0`: tensor rank 2.
    Ghz,
    /// `Δ = 0` with every single-party flattening of rank 2: tensor rank 3.
    W,
    /// Not genuinely tripartite.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperdetReport {
    pub delta: Scalar,
    pub class: Class222,
    pub rank: usize,
}

/// Cayley's hyperdeterminant of a `2×2×2` state and the rank it implies.
pub fn hyperdet_222(s: &SparseState) -> Result<HyperdetReport> {
    if s.local_dims() != [2, 2, 2] {
        return Err(Error::ShapeMismatch(format!(
            "hyperdeterminant needs dims [2, 2, 2], got {:?}",
            s.local_dims()
        )));
    }
    let zero = Scalar::zero();
    let a = |i: usize, j: usize, k: usize| s.amplitude(&[i, j, k]).unwrap_or(&zero).clone();
    let (a000, a001, a010, a011) = (a(0, 0, 0), a(0, 0, 1), a(0, 1, 0), a(0, 1, 1));
    let (a100, a101, a110, a111) = (a(1, 0, 0), a(1, 0, 1), a(1, 1, 0), a(1, 1, 1));
    let sq = |x: &Scalar, y: &Scalar| (x * y).pow(2);
    let prod4 = |w: &Scalar, x: &Scalar, y: &Scalar, z: &Scalar| &(w * x) * &(y * z);
    let squares = [
        sq(&a000, &a111),
        sq(&a001, &a110),
        sq(&a010, &a101),
        sq(&a100, &a011),
    ];
    let pairs = [
        prod4(&a000, &a001, &a110, &a111),
        prod4(&a000, &a010, &a101, &a111),
        prod4(&a000, &a100, &a011, &a111),
        prod4(&a001, &a010, &a101, &a110),
        prod4(&a001, &a100, &a011, &a110),
        prod4(&a010, &a100, &a011, &a101),
    ];
    let quads = [prod4(&a000, &a011, &a101, &a110), prod4(&a001, &a010, &a100, &a111)];
    let sum = |xs: &[Scalar]| xs.iter().fold(Scalar::zero(), |acc, x| &acc + x);
    let delta = &(&sum(&squares) - &(&Scalar::int(2) * &sum(&pairs))) + &(&Scalar::int(4) * &sum(&quads));

    let delta_zero = if delta.is_exact() {
        delta.is_zero()
    } else {
        // Δ is quartic in the amplitudes
        delta.abs() <= 1e-10 * s.norm().powi(4)
    };
    let ranks = (0..3).map(|p| flattening_rank(s, &[p])).collect::<Result<Vec<_>>>()?;
    let (class, rank) = if !delta_zero {
        (Class222::Ghz, 2)
    } else if ranks.iter().all(|&r| r == 2) {
        (Class222::W, 3)
    } else {
        (Class222::Degenerate, ranks.into_iter().max().unwrap_or(0))
    };
    Ok(HyperdetReport { delta, class, rank })
}
