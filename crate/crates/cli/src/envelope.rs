//! The on-disk certificate format.

use serde::{Deserialize, Serialize};
use symrank::slocc::{
    build_catalyst, epr_triangle, matmul_tensor, ConversionWitness, ProductDecomposition, WITNESS_TOL,
};
use symrank::sympoly::{
    dicke_state, expand, poly_from_state, state_from_poly, ExponentVector, HomogeneousPolynomial, SymmetricDecomposition,
    FLOAT_CERT_TOL,
};
use symrank::tensors::{direct_sum, tensor_product, FuseMode, SparseState};
use symrank::wpower::{ghz_state, w_power_state, w_state};
use symrank::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// How to rebuild the target of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gen", rename_all = "snake_case")]
pub enum TargetDescriptor {
    WPower {
        #[serde(rename = "N")]
        parties: u32,
        n: u32,
    },
    /// `D(m, n)`: `m + n` qubits with `n` excitations.
    Dicke { m: u32, n: u32 },
    /// The bare monomial `x^exps`.
    Monomial { exps: Vec<u32> },
    Ghz {
        #[serde(rename = "N")]
        parties: usize,
        d: usize,
    },
    Matmul { d: usize },
    EprTriangle,
    /// `φ ⊗ c` for `ψ = GHZ_N^{N−1}`, `φ = W_N`; `c` is the generic catalyst
    /// with `n` blocks or, when `simple`, `W_N ⊕ GHZ_N^{N−1}`.
    WCatalysis {
        #[serde(rename = "N")]
        parties: usize,
        n: usize,
        simple: bool,
    },
    State { state: SparseState },
    Polynomial { poly: HomogeneousPolynomial },
}

impl TargetDescriptor {
    pub fn state(&self) -> Result<SparseState> {
        match self {
            TargetDescriptor::WPower { parties, n } => w_power_state(*parties, *n),
            TargetDescriptor::Dicke { m, n } => dicke_state(&ExponentVector::new(vec![*m, *n])),
            TargetDescriptor::Monomial { .. } | TargetDescriptor::Polynomial { .. } => {
                state_from_poly(&self.polynomial()?)
            }
            TargetDescriptor::Ghz { parties, d } => ghz_state(*parties, *d),
            TargetDescriptor::Matmul { d } => matmul_tensor(*d),
            TargetDescriptor::EprTriangle => epr_triangle(),
            TargetDescriptor::WCatalysis { parties, n, simple } => {
                let psi = ghz_state(*parties, parties.saturating_sub(1))?;
                let phi = w_state(*parties)?;
                let c = if *simple {
                    direct_sum(&phi, &psi)?
                } else {
                    build_catalyst(&psi, &phi, *n)?
                };
                tensor_product(&phi, &c, FuseMode::PerPartyFuse)
            }
            TargetDescriptor::State { state } => Ok(state.clone()),
        }
    }

    pub fn polynomial(&self) -> Result<HomogeneousPolynomial> {
        match self {
            TargetDescriptor::Monomial { exps } => {
                Ok(HomogeneousPolynomial::monomial(ExponentVector::new(exps.clone())))
            }
            TargetDescriptor::Polynomial { poly } => Ok(poly.clone()),
            other => poly_from_state(&other.state()?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Symmetric,
    Product,
    Witness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarField {
    Rational,
    Complex64,
}

impl ScalarField {
    fn of(exact: bool) -> Self {
        if exact {
            ScalarField::Rational
        } else {
            ScalarField::Complex64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Symmetric(SymmetricDecomposition),
    Product(ProductDecomposition),
    Witness(ConversionWitness),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub format_version: u32,
    pub kind: Kind,
    pub target: TargetDescriptor,
    pub scalar_field: ScalarField,
    /// Relative residual accepted for float payloads; rational payloads
    /// must match exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub payload: Payload,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub kind: Kind,
    pub terms: usize,
    pub exact: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub ok: bool,
}

impl Envelope {
    pub fn new(target: TargetDescriptor, payload: Payload, provenance: Provenance) -> Self {
        let (kind, exact) = match &payload {
            Payload::Symmetric(d) => (Kind::Symmetric, d.is_exact()),
            Payload::Product(p) => (Kind::Product, p.is_exact()),
            Payload::Witness(w) => (
                Kind::Witness,
                w.ops.is_exact() && w.source.is_exact() && w.target.is_exact() && w.scale.is_exact(),
            ),
        };
        Envelope {
            format_version: FORMAT_VERSION,
            kind,
            target,
            scalar_field: ScalarField::of(exact),
            tolerance: None,
            payload,
            provenance,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn terms(&self) -> usize {
        match &self.payload {
            Payload::Symmetric(d) => d.len(),
            Payload::Product(p) => p.len(),
            Payload::Witness(w) => w.source.local_dims().first().copied().unwrap_or(0),
        }
    }

    /// Checks the payload against the target rebuilt from the descriptor.
    pub fn verify(&self) -> Result<VerifyReport> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported format_version {}", self.format_version)));
        }
        let declared = matches!(
            (&self.payload, self.kind),
            (Payload::Symmetric(_), Kind::Symmetric)
                | (Payload::Product(_), Kind::Product)
                | (Payload::Witness(_), Kind::Witness)
        );
        if !declared {
            return Err(Error::Parse(format!("payload does not match kind {:?}", self.kind)));
        }
        let (residual, exact, default_tol) = match &self.payload {
            Payload::Symmetric(dec) => {
                let h = self.target.polynomial()?;
                if dec.degree != h.degree() || dec.vars != h.num_vars() {
                    return Err(Error::ShapeMismatch(format!(
                        "certificate is degree {} in {} variables, target degree {} in {}",
                        dec.degree,
                        dec.vars,
                        h.degree(),
                        h.num_vars()
                    )));
                }
                let diff = expand(dec).sub(&h)?;
                let residual = if diff.is_zero() { 0.0 } else { diff.tensor_norm() / h.tensor_norm() };
                (residual, dec.is_exact() && h.is_exact(), FLOAT_CERT_TOL)
            }
            Payload::Product(p) => {
                let t = self.target.state()?;
                (p.residual(&t)?, p.is_exact() && t.is_exact(), FLOAT_CERT_TOL)
            }
            Payload::Witness(w) => {
                let t = self.target.state()?;
                if w.target != t {
                    return Err(Error::Verification {
                        what: "witness target differs from the descriptor".into(),
                        residual: f64::INFINITY,
                    });
                }
                let exact = w.ops.is_exact() && w.source.is_exact() && t.is_exact() && w.scale.is_exact();
                let residual = if w.scale.is_zero() { f64::INFINITY } else { w.residual()? };
                (residual, exact, WITNESS_TOL)
            }
        };
        let tolerance = if exact { 0.0 } else { self.tolerance.unwrap_or(default_tol) };
        let ok = if exact { residual == 0.0 } else { residual <= tolerance };
        Ok(VerifyReport {
            kind: self.kind,
            terms: self.terms(),
            exact,
            residual,
            tolerance,
            ok,
        })
    }
}
