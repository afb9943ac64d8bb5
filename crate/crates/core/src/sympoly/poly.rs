use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinat::{compositions, multinomial};
use crate::error::{Error, Result};
use crate::tensors::{Scalar, ScalarRepr};

/// Exponents `(j_1, …, j_d)` of a monomial `x_1^{j_1} ⋯ x_d^{j_d}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn new(exps: Vec<u32>) -> Self {
        ExponentVector(exps)
    }

    /// `x_{var}^{degree}` in `vars` variables.
    pub fn power(vars: usize, var: usize, degree: u32) -> Self {
        let mut e = vec![0; vars];
        e[var] = degree;
        ExponentVector(e)
    }

    /// Monomial with exponent 1 on each listed variable (repeats add up).
    pub fn from_vars(vars: usize, which: &[usize]) -> Self {
        let mut e = vec![0; vars];
        for &v in which {
            e[v] += 1;
        }
        ExponentVector(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    /// The word `0^{j_0} 1^{j_1} …` in sorted order.
    pub fn word(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
            .collect()
    }

    pub fn from_word(vars: usize, word: &[usize]) -> Self {
        ExponentVector::from_vars(vars, word)
    }

    pub fn multinomial(&self) -> num_bigint::BigInt {
        multinomial(&self.0)
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// A homogeneous polynomial of degree `N` in `d` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPolynomial {
    degree: u32,
    vars: usize,
    coeffs: BTreeMap<ExponentVector, Scalar>,
}

impl HomogeneousPolynomial {
    pub fn zero(degree: u32, vars: usize) -> Self {
        HomogeneousPolynomial {
            degree,
            vars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(degree: u32, vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, Scalar)>,
    {
        let mut p = HomogeneousPolynomial::zero(degree, vars);
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    pub fn monomial(exps: ExponentVector) -> Self {
        let (degree, vars) = (exps.degree(), exps.num_vars());
        let mut coeffs = BTreeMap::new();
        coeffs.insert(exps, Scalar::one());
        HomogeneousPolynomial { degree, vars, coeffs }
    }

    pub fn add_term(&mut self, exps: ExponentVector, c: Scalar) -> Result<()> {
        if exps.num_vars() != self.vars || exps.degree() != self.degree {
            return Err(Error::ShapeMismatch(format!(
                "monomial {exps} does not have degree {} in {} variables",
                self.degree, self.vars
            )));
        }
        self.add_unchecked(exps, &c);
        Ok(())
    }

    fn add_unchecked(&mut self, exps: ExponentVector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&exps) {
            Some(v) => {
                *v = &*v + c;
                if v.is_zero() {
                    self.coeffs.remove(&exps);
                }
            }
            None => {
                self.coeffs.insert(exps, c.clone());
            }
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn num_vars(&self) -> usize {
        self.vars
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.values().all(Scalar::is_exact)
    }

    pub fn coeff(&self, exps: &ExponentVector) -> Scalar {
        self.coeffs.get(exps).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Scalar)> {
        self.coeffs.iter()
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree || self.vars != other.vars {
            return Err(Error::ShapeMismatch(format!(
                "degree {} in {} vars vs degree {} in {} vars",
                self.degree, self.vars, other.degree, other.vars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, &Scalar::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, &Scalar::int(-1))
    }

    /// `self + factor · other`.
    pub fn combine(&self, other: &Self, factor: &Scalar) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_unchecked(e.clone(), &(c * factor));
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: &Scalar) -> Self {
        let mut out = HomogeneousPolynomial::zero(self.degree, self.vars);
        for (e, c) in &self.coeffs {
            out.add_unchecked(e.clone(), &(c * factor));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.vars != other.vars {
            return Err(Error::ShapeMismatch(format!(
                "multiplying polynomials in {} and {} variables",
                self.vars, other.vars
            )));
        }
        let mut out = HomogeneousPolynomial::zero(self.degree + other.degree, self.vars);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                out.add_unchecked(ea.add(eb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = HomogeneousPolynomial::from_terms(0, self.vars, [(ExponentVector(vec![0; self.vars]), Scalar::one())])?;
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Replaces each variable `x_i` by the linear form `images[i]`.
    pub fn substitute(&self, images: &[LinearForm]) -> Result<Self> {
        if images.len() != self.vars {
            return Err(Error::ShapeMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.vars
            )));
        }
        let new_vars = images.first().map_or(0, LinearForm::num_vars);
        if images.iter().any(|l| l.num_vars() != new_vars) {
            return Err(Error::ShapeMismatch("images live in different variable counts".into()));
        }
        let lifted: Vec<HomogeneousPolynomial> = images.iter().map(LinearForm::to_polynomial).collect();
        let mut out = HomogeneousPolynomial::zero(self.degree, new_vars);
        for (e, c) in &self.coeffs {
            let mut term = HomogeneousPolynomial::from_terms(0, new_vars, [(ExponentVector(vec![0; new_vars]), c.clone())])?;
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&lifted[i].pow(k)?)?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// `max |self − other| / max |other|` over coefficients; exact zero when
    /// both are rational and equal.
    pub fn relative_residual(&self, target: &Self) -> Result<f64> {
        let diff = self.sub(target)?;
        if diff.is_zero() {
            return Ok(0.0);
        }
        let scale = target.max_abs();
        Ok(if scale == 0.0 { diff.max_abs() } else { diff.max_abs() / scale })
    }

    /// Frobenius norm of the associated symmetric tensor,
    /// `sqrt(Σ |c_j|² / multinom(j))`.
    pub fn tensor_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(e, c)| c.abs().powi(2) / crate::tensors::rational_to_f64(&e.multinomial().into()))
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_complex(&self) -> Self {
        let mut out = HomogeneousPolynomial::zero(self.degree, self.vars);
        for (e, c) in &self.coeffs {
            out.add_unchecked(e.clone(), &c.to_complex());
        }
        out
    }

    /// Value at a complex point.
    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(e, c)| {
                e.0.iter()
                    .zip(x)
                    .fold(c.to_c64(), |acc, (&k, &xi)| acc * xi.powu(k))
            })
            .sum()
    }
}

impl fmt::Display for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*{e}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTermRepr {
    exps: Vec<u32>,
    #[serde(flatten)]
    value: ScalarRepr,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    degree: u32,
    vars: usize,
    terms: Vec<PolyTermRepr>,
}

impl Serialize for HomogeneousPolynomial {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            degree: self.degree,
            vars: self.vars,
            terms: self
                .coeffs
                .iter()
                .map(|(e, c)| PolyTermRepr {
                    exps: e.0.clone(),
                    value: c.into(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for HomogeneousPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(de)?;
        let terms = repr
            .terms
            .iter()
            .map(|t| Ok((ExponentVector(t.exps.clone()), Scalar::try_from(&t.value)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        HomogeneousPolynomial::from_terms(repr.degree, repr.vars, terms).map_err(serde::de::Error::custom)
    }
}

/// `β_1 x_1 + … + β_d x_d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearForm(pub Vec<Scalar>);

impl LinearForm {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        LinearForm(coeffs)
    }

    /// The coordinate form `x_var`.
    pub fn var(vars: usize, var: usize) -> Self {
        let mut c = vec![Scalar::zero(); vars];
        c[var] = Scalar::one();
        LinearForm(c)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        LinearForm(coeffs.iter().map(|&c| Scalar::int(c)).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(Scalar::is_exact)
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        LinearForm(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, f: &Scalar) -> LinearForm {
        LinearForm(self.0.iter().map(|a| a * f).collect())
    }

    pub fn to_polynomial(&self) -> HomogeneousPolynomial {
        let d = self.0.len();
        let mut p = HomogeneousPolynomial::zero(1, d);
        for (i, c) in self.0.iter().enumerate() {
            p.add_unchecked(ExponentVector::power(d, i, 1), c);
        }
        p
    }

    /// Multinomial expansion of `self^k`, visiting only the support of the form.
    pub fn power(&self, k: u32) -> HomogeneousPolynomial {
        let d = self.0.len();
        let support: Vec<usize> = (0..d).filter(|&i| !self.0[i].is_zero()).collect();
        let mut p = HomogeneousPolynomial::zero(k, d);
        if support.is_empty() {
            return p;
        }
        // Powers of each coefficient, computed once.
        let pows: Vec<Vec<Scalar>> = support
            .iter()
            .map(|&i| {
                let mut v = vec![Scalar::one()];
                for e in 1..=k as usize {
                    let next = &v[e - 1] * &self.0[i];
                    v.push(next);
                }
                v
            })
            .collect();
        for comp in compositions(k, support.len()) {
            let mut c = Scalar::big_int(multinomial(&comp));
            for (s, &e) in comp.iter().enumerate() {
                c = c * &pows[s][e as usize];
            }
            let mut exps = vec![0; d];
            for (s, &i) in support.iter().enumerate() {
                exps[i] = comp[s];
            }
            p.add_unchecked(ExponentVector(exps), &c);
        }
        p
    }
}
