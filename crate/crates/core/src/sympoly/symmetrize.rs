use num_bigint::BigInt;
use num_rational::BigRational;

use super::decomp::SymmetricDecomposition;
use super::poly::LinearForm;
use crate::combinat::factorial;
use crate::error::{Error, Result};
use crate::slocc::ProductDecomposition;
use crate::tensors::Scalar;

/// Symmetric certificate for the symmetrization of a product certificate.
///
/// Each product term `v_1 ⊗ … ⊗ v_N` is replaced by
/// `1/(2^{N−1} N!) Σ_ε (Π ε) (v_1 + ε_2 v_2 + … + ε_N v_N)^{⊗N}`; a term whose
/// vectors all coincide is kept as a single power.
pub fn symmetrize_decomposition(p: &ProductDecomposition) -> Result<SymmetricDecomposition> {
    let dims = p.local_dims();
    let d = dims[0];
    if dims.iter().any(|&x| x != d) {
        return Err(Error::ShapeMismatch(format!(
            "symmetrization needs equal local dims, got {dims:?}"
        )));
    }
    let n = dims.len();
    let mut out = SymmetricDecomposition::new(n as u32, d);
    let norm = Scalar::Rational(BigRational::new(
        BigInt::from(1),
        (BigInt::from(1) << (n - 1)) * factorial(n as u32),
    ));
    for term in &p.terms {
        let first = &term.vectors[0];
        if term.vectors.iter().all(|v| v == first) {
            out.push(term.weight.clone(), LinearForm::new(first.clone()))?;
            continue;
        }
        let w = &term.weight * &norm;
        for signs in 0u64..(1 << (n - 1)) {
            let mut form = first.clone();
            let mut sign = Scalar::one();
            for (bit, v) in term.vectors[1..].iter().enumerate() {
                let negate = signs >> bit & 1 == 1;
                if negate {
                    sign = -sign;
                }
                for (slot, x) in form.iter_mut().zip(v) {
                    *slot = if negate { &*slot - x } else { &*slot + x };
                }
            }
            let form = LinearForm::new(form);
            if !form.is_zero() {
                out.push(&w * &sign, form)?;
            }
        }
    }
    Ok(merge_equal_forms(out))
}

/// Combines terms with identical forms and drops the ones that cancel.
fn merge_equal_forms(dec: SymmetricDecomposition) -> SymmetricDecomposition {
    let mut merged = SymmetricDecomposition::new(dec.degree, dec.vars);
    for t in dec.terms {
        match merged.terms.iter_mut().find(|m| m.form == t.form) {
            Some(m) => m.weight = &m.weight + &t.weight,
            None => merged.terms.push(t),
        }
    }
    merged.pruned()
}
