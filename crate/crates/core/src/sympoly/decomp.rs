use serde::{Deserialize, Serialize};

use super::poly::{HomogeneousPolynomial, LinearForm};
use crate::error::{Error, Result};
use crate::tensors::Scalar;

/// One weighted power `weight · form^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub weight: Scalar,
    pub form: LinearForm,
}

/// A Waring certificate `Σ w_i ℓ_i^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricDecomposition {
    pub degree: u32,
    pub vars: usize,
    pub terms: Vec<PowerTerm>,
}

/// Outcome of checking a certificate against its target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verified {
    pub residual: f64,
    pub exact: bool,
}

impl SymmetricDecomposition {
    pub fn new(degree: u32, vars: usize) -> Self {
        SymmetricDecomposition {
            degree,
            vars,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, weight: Scalar, form: LinearForm) -> Result<()> {
        if form.num_vars() != self.vars {
            return Err(Error::ShapeMismatch(format!(
                "form in {} variables added to a decomposition in {}",
                form.num_vars(),
                self.vars
            )));
        }
        self.terms.push(PowerTerm { weight, form });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|t| t.weight.is_exact() && t.form.is_exact())
    }

    /// Appends all terms of `other`.
    pub fn extend(&mut self, other: SymmetricDecomposition) -> Result<()> {
        if other.degree != self.degree || other.vars != self.vars {
            return Err(Error::ShapeMismatch("concatenating decompositions of different shape".into()));
        }
        self.terms.extend(other.terms);
        Ok(())
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: &Scalar) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.weight = &t.weight * factor;
        }
        out
    }

    /// Re-embeds forms through `embed[i]` = index of variable `i` in a
    /// decomposition over `vars` variables.
    pub fn lift(&self, vars: usize, embed: &[usize]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut c = vec![Scalar::zero(); vars];
                for (i, v) in t.form.coeffs().iter().enumerate() {
                    c[embed[i]] = v.clone();
                }
                PowerTerm {
                    weight: t.weight.clone(),
                    form: LinearForm::new(c),
                }
            })
            .collect();
        SymmetricDecomposition {
            degree: self.degree,
            vars,
            terms,
        }
    }

    /// Composes each form with a linear substitution: variable `i` of the
    /// forms is replaced by `images[i]`.
    pub fn substitute(&self, images: &[LinearForm]) -> Result<Self> {
        if images.len() != self.vars {
            return Err(Error::ShapeMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.vars
            )));
        }
        let vars = images.first().map_or(0, LinearForm::num_vars);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut c = vec![Scalar::zero(); vars];
                for (b, img) in t.form.coeffs().iter().zip(images) {
                    if b.is_zero() {
                        continue;
                    }
                    for (slot, v) in c.iter_mut().zip(img.coeffs()) {
                        *slot = &*slot + &(b * v);
                    }
                }
                PowerTerm {
                    weight: t.weight.clone(),
                    form: LinearForm::new(c),
                }
            })
            .collect();
        Ok(SymmetricDecomposition {
            degree: self.degree,
            vars,
            terms,
        })
    }

    /// Drops zero-weight and zero-form terms.
    pub fn pruned(&self) -> Self {
        let mut out = self.clone();
        out.terms.retain(|t| !t.weight.is_zero() && !t.form.is_zero());
        out
    }

    /// Checks `expand(self)` against `target`: exact equality when both are
    /// rational, relative residual `≤ tol` otherwise.
    pub fn verify(&self, target: &HomogeneousPolynomial, tol: f64) -> Result<Verified> {
        let residual = expand(self).relative_residual(target)?;
        let exact = self.is_exact() && target.is_exact();
        let ok = if exact { residual == 0.0 } else { residual <= tol };
        if !ok {
            return Err(Error::Verification {
                what: format!("{}-term symmetric decomposition", self.len()),
                residual,
            });
        }
        Ok(Verified { residual, exact })
    }
}

/// `Σ w_i ℓ_i^N` as a polynomial.
pub fn expand(dec: &SymmetricDecomposition) -> HomogeneousPolynomial {
    let mut out = HomogeneousPolynomial::zero(dec.degree, dec.vars);
    for t in &dec.terms {
        let p = t.form.power(dec.degree);
        out = out.combine(&p, &t.weight).expect("same shape by construction");
    }
    out
}
