use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sympoly::SymmetricDecomposition;
use crate::tensors::{equal_up_to_scale, MultiIndex, Scalar, SparseState};

/// One weighted product `w · v_1 ⊗ … ⊗ v_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    pub weight: Scalar,
    pub vectors: Vec<Vec<Scalar>>,
}

/// A CP certificate `Σ_i w_i ⊗_α v_i^α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductDecomposition {
    pub local_dims: Vec<usize>,
    pub terms: Vec<ProductTerm>,
}

impl ProductDecomposition {
    pub fn new(local_dims: Vec<usize>) -> Self {
        ProductDecomposition {
            local_dims,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, weight: Scalar, vectors: Vec<Vec<Scalar>>) -> Result<()> {
        if vectors.len() != self.local_dims.len()
            || vectors.iter().zip(&self.local_dims).any(|(v, &d)| v.len() != d)
        {
            return Err(Error::ShapeMismatch(format!(
                "product term does not fit local dims {:?}",
                self.local_dims
            )));
        }
        if vectors.iter().any(|v| v.iter().all(Scalar::is_zero)) {
            return Err(Error::InvalidArgument("product term with a zero vector".into()));
        }
        self.terms.push(ProductTerm { weight, vectors });
        Ok(())
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn num_parties(&self) -> usize {
        self.local_dims.len()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.weight.is_exact() && t.vectors.iter().flatten().all(Scalar::is_exact))
    }

    /// The state `Σ_i w_i ⊗_α v_i^α`.
    pub fn to_state(&self) -> Result<SparseState> {
        let mut acc: HashMap<MultiIndex, Scalar> = HashMap::new();
        for t in &self.terms {
            let supports: Vec<Vec<(usize, &Scalar)>> = t
                .vectors
                .iter()
                .map(|v| v.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
                .collect();
            let mut partial: Vec<(MultiIndex, Scalar)> = vec![(Vec::new(), t.weight.clone())];
            for sup in &supports {
                let mut next = Vec::with_capacity(partial.len() * sup.len());
                for (idx, v) in &partial {
                    for &(j, x) in sup {
                        let mut k = idx.clone();
                        k.push(j);
                        next.push((k, v * x));
                    }
                }
                partial = next;
            }
            for (k, v) in partial {
                match acc.get_mut(&k) {
                    Some(a) => *a = &*a + &v,
                    None => {
                        acc.insert(k, v);
                    }
                }
            }
        }
        SparseState::from_entries(self.local_dims.clone(), acc)
    }

    /// `‖to_state − target‖ / ‖target‖`, exactly zero for a matching
    /// rational certificate.
    pub fn residual(&self, target: &SparseState) -> Result<f64> {
        let s = self.to_state()?;
        if s.local_dims() != target.local_dims() {
            return Err(Error::ShapeMismatch(format!(
                "certificate dims {:?} vs target dims {:?}",
                s.local_dims(),
                target.local_dims()
            )));
        }
        let diff = s.sub(target)?;
        if diff.is_zero() {
            return Ok(0.0);
        }
        let t = target.norm();
        Ok(if t == 0.0 { diff.norm() } else { diff.norm() / t })
    }

    /// Exact equality for rational data, relative residual `≤ tol` otherwise.
    pub fn verify(&self, target: &SparseState, tol: f64) -> Result<f64> {
        let residual = self.residual(target)?;
        let exact = self.is_exact() && target.is_exact();
        if (exact && residual != 0.0) || residual > tol {
            return Err(Error::Verification {
                what: format!("{}-term product decomposition", self.len()),
                residual,
            });
        }
        Ok(residual)
    }

    /// True when the certificate reproduces `target` up to a nonzero scale.
    pub fn matches_up_to_scale(&self, target: &SparseState, tol: f64) -> Result<bool> {
        Ok(equal_up_to_scale(&self.to_state()?, target, tol)?.equal)
    }
}

/// Reads each power term `w ℓ^N` as the product term `w ℓ ⊗ … ⊗ ℓ`.
pub fn symmetric_to_product(dec: &SymmetricDecomposition) -> Result<ProductDecomposition> {
    let n = dec.degree as usize;
    let mut out = ProductDecomposition::new(vec![dec.vars; n]);
    for t in &dec.terms {
        out.push(t.weight.clone(), vec![t.form.coeffs().to_vec(); n])?;
    }
    Ok(out)
}
