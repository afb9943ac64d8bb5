use serde::{Deserialize, Serialize};

use super::product::ProductDecomposition;
use crate::error::{Error, Result};
use crate::tensors::{
    apply_local, direct_sum, equal_up_to_scale, tensor_power, LocalOperatorSet, Matrix, Scalar, SparseState,
};
use crate::wpower::ghz_state;

/// Relative tolerance for witnesses that involve float scalars.
pub const WITNESS_TOL: f64 = 1e-8;

/// Local operators with `apply_local(ops, source) = scale · target`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConversionWitness {
    pub source: SparseState,
    pub target: SparseState,
    pub ops: LocalOperatorSet,
    pub scale: Scalar,
}

impl ConversionWitness {
    /// Applies `ops`, determines the scale and verifies the result.
    pub fn new(source: SparseState, target: SparseState, ops: LocalOperatorSet) -> Result<Self> {
        let image = apply_local(&ops, &source)?;
        let m = equal_up_to_scale(&image, &target, WITNESS_TOL)?;
        if !m.equal {
            return Err(Error::Verification {
                what: "conversion witness".into(),
                residual: m.residual,
            });
        }
        Ok(ConversionWitness {
            source,
            target,
            ops,
            scale: m.scale,
        })
    }

    /// `‖ops·source − scale·target‖ / ‖ops·source‖`, recomputed from scratch.
    pub fn residual(&self) -> Result<f64> {
        let image = apply_local(&self.ops, &self.source)?;
        let diff = image.combine(&self.target, &-&self.scale)?;
        if diff.is_zero() {
            return Ok(0.0);
        }
        let n = image.norm();
        Ok(if n == 0.0 { f64::INFINITY } else { diff.norm() / n })
    }

    /// Exact check for rational witnesses, relative `tol` otherwise.
    pub fn verify(&self, tol: f64) -> Result<f64> {
        let residual = self.residual()?;
        let exact = self.ops.is_exact() && self.source.is_exact() && self.target.is_exact() && self.scale.is_exact();
        if self.scale.is_zero() || (exact && residual != 0.0) || residual > tol {
            return Err(Error::Verification {
                what: "conversion witness".into(),
                residual,
            });
        }
        Ok(residual)
    }

    /// `self` followed by `next` (whose source must equal this target).
    pub fn then(&self, next: &ConversionWitness) -> Result<ConversionWitness> {
        ConversionWitness::new(self.source.clone(), next.target.clone(), next.ops.compose(&self.ops)?)
    }
}

/// Operators taking `GHZ(N, r)` to the state of an `r`-term certificate:
/// party 0 gets `Σ_i w_i |v_i^0⟩⟨i|`, every other party `Σ_i |v_i^α⟩⟨i|`.
pub fn ghz_to_state_operators(cert: &ProductDecomposition, target: &SparseState) -> Result<ConversionWitness> {
    if cert.is_empty() {
        return Err(Error::InvalidArgument("empty certificate".into()));
    }
    cert.verify(target, WITNESS_TOL)?;
    let r = cert.len();
    let ops = (0..cert.num_parties())
        .map(|p| {
            let columns: Vec<Vec<Scalar>> = cert
                .terms
                .iter()
                .map(|t| {
                    if p == 0 {
                        t.vectors[0].iter().map(|x| x * &t.weight).collect()
                    } else {
                        t.vectors[p].clone()
                    }
                })
                .collect();
            Matrix::from_columns(cert.local_dims()[p], &columns)
        })
        .collect::<Result<Vec<_>>>()?;
    ConversionWitness::new(ghz_state(cert.num_parties(), r)?, target.clone(), LocalOperatorSet::new(ops)?)
}

/// Block-diagonal combination of two witnesses; the second block's party-0
/// operator is rescaled so that both blocks share the first one's scale.
pub fn direct_sum_witness(w1: &ConversionWitness, w2: &ConversionWitness) -> Result<ConversionWitness> {
    let mut ops2 = w2.ops.clone();
    if w1.scale != w2.scale {
        ops2.scale_party(0, &(&w1.scale / &w2.scale));
    }
    ConversionWitness::new(
        direct_sum(&w1.source, &w2.source)?,
        direct_sum(&w1.target, &w2.target)?,
        w1.ops.direct_sum(&ops2)?,
    )
}

/// `GHZ(N, d)^{⊗m}` fused per party is `GHZ(N, d^m)` on the nose: the fused
/// index of `(i, …, i)` copies is the base-`d` number with digits `i`, and
/// every index in `0..d^m` occurs once.
pub fn ghz_power_fusion(d: usize, m: usize, n_parties: usize) -> Result<ConversionWitness> {
    if d == 0 || m == 0 {
        return Err(Error::InvalidArgument("GHZ fusion needs d, m >= 1".into()));
    }
    let source = tensor_power(&ghz_state(n_parties, d)?, m)?;
    let level = d.pow(m as u32);
    let ops = LocalOperatorSet::identity(&vec![level; n_parties]);
    ConversionWitness::new(source, ghz_state(n_parties, level)?, ops)
}
