use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use super::decomp::SymmetricDecomposition;
use super::poly::{ExponentVector, HomogeneousPolynomial, LinearForm};
use crate::combinat::{binomial, factorial};
use crate::error::{Error, Result};
use crate::tensors::{Matrix, Scalar};

/// Relative residual accepted for certificates with float scalars.
pub const FLOAT_CERT_TOL: f64 = 1e-9;

/// Signed-sum-of-powers identity for a squarefree monomial in `k` variables:
/// `x_1⋯x_k = 1/(2^{k−1} k!) Σ_ε (Π ε) (x_1 + ε_2 x_2 + … + ε_k x_k)^k`.
pub fn fischer_decompose(exps: &ExponentVector) -> Result<SymmetricDecomposition> {
    if exps.exps().iter().any(|&e| e > 1) {
        return Err(Error::NotSquarefree(exps.exps().to_vec()));
    }
    let present: Vec<usize> = (0..exps.num_vars()).filter(|&i| exps.exps()[i] == 1).collect();
    let k = present.len();
    if k == 0 {
        return Err(Error::InvalidArgument("Fischer identity needs at least one variable".into()));
    }
    let d = exps.num_vars();
    let norm = BigRational::new(BigInt::from(1), (BigInt::from(1) << (k - 1)) * factorial(k as u32));
    let mut dec = SymmetricDecomposition::new(k as u32, d);
    for signs in 0u64..(1 << (k - 1)) {
        let mut form = vec![Scalar::zero(); d];
        form[present[0]] = Scalar::one();
        let mut sign = 1i64;
        for (bit, &v) in present[1..].iter().enumerate() {
            if signs >> bit & 1 == 1 {
                form[v] = Scalar::int(-1);
                sign = -sign;
            } else {
                form[v] = Scalar::one();
            }
        }
        dec.push(Scalar::Rational(&norm * BigInt::from(sign)), LinearForm::new(form))?;
    }
    dec.verify(&HomogeneousPolynomial::monomial(exps.clone()), 0.0)?;
    Ok(dec)
}

/// Decomposes `x^a y^b` (`a ≥ b`) into `a + 1` powers of forms in `(x, y)`
/// (a single term when `b = 0`).
///
/// For `b ≥ 2` the forms are `x + ω^j y` with `ω` a primitive `(a+1)`-th
/// root of unity. For `b = 1` a rational family with the same term count is
/// used instead: `Σ_j c_j (x + t_j y)^{a+1} + c_∞ y^{a+1}`.
pub fn binary_monomial_decompose(a: u32, b: u32) -> Result<SymmetricDecomposition> {
    if a < b {
        return Err(Error::InvalidArgument(format!(
            "binary monomial needs a >= b, got a = {a}, b = {b}"
        )));
    }
    if a == 0 {
        return Err(Error::InvalidArgument("binary monomial needs a >= 1".into()));
    }
    let dec = match b {
        0 => {
            let mut dec = SymmetricDecomposition::new(a, 2);
            dec.push(Scalar::one(), LinearForm::from_ints(&[1, 0]))?;
            dec
        }
        1 if a >= 2 => rational_linear_case(a)?,
        _ => roots_of_unity_case(a, b)?,
    };
    let target = HomogeneousPolynomial::monomial(ExponentVector(vec![a, b]));
    dec.verify(&target, FLOAT_CERT_TOL)?;
    Ok(dec)
}

fn roots_of_unity_case(a: u32, b: u32) -> Result<SymmetricDecomposition> {
    let r = a + 1;
    let norm = Scalar::Rational(BigRational::new(BigInt::from(1), BigInt::from(r) * binomial(a + b, b)));
    let mut dec = SymmetricDecomposition::new(a + b, 2);
    for j in 0..r {
        // ω^j is ±1 exactly when 2j is a multiple of r.
        let (root, weight) = if j == 0 {
            (Scalar::one(), norm.clone())
        } else if 2 * j == r {
            let sign = if b.is_multiple_of(2) { 1 } else { -1 };
            (Scalar::int(-1), &norm * &Scalar::int(sign))
        } else {
            let theta = 2.0 * std::f64::consts::PI * f64::from(j) / f64::from(r);
            let w = Complex64::from_polar(1.0, theta);
            let wb = Complex64::from_polar(1.0, -theta * f64::from(b));
            (Scalar::from_c64(w), &norm * &Scalar::from_c64(wb))
        };
        dec.push(weight, LinearForm::new(vec![Scalar::one(), root]))?;
    }
    Ok(dec)
}

/// `x^a y = Σ_{j=1}^{a} c_j (x + t_j y)^{a+1} + c_∞ y^{a+1}` with distinct
/// nonzero `t_j` satisfying `Σ 1/t_j = 0`, which makes the `x y^a`
/// coefficient vanish once the lower moments are matched.
fn rational_linear_case(a: u32) -> Result<SymmetricDecomposition> {
    let n = a as usize;
    let mut ts: Vec<Scalar> = (1..n as i64).map(Scalar::int).collect();
    let harmonic: Scalar = (1..n as i64).map(|i| Scalar::ratio(1, i)).sum();
    ts.push(-harmonic.recip()?);
    // Moment system Σ_j c_j t_j^s = δ_{s1}/(a+1), s = 0..a−1.
    let rows = (0..n)
        .map(|s| ts.iter().map(|t| t.pow(s as u32)).collect())
        .collect();
    let v = Matrix::from_rows(rows)?;
    let mut rhs = vec![Scalar::zero(); n];
    rhs[1] = Scalar::ratio(1, i64::from(a) + 1);
    let c = v.inverse()?.apply(&rhs)?;
    let top: Scalar = c.iter().zip(&ts).map(|(cj, t)| cj * &t.pow(a + 1)).sum();
    let mut dec = SymmetricDecomposition::new(a + 1, 2);
    for (cj, t) in c.into_iter().zip(ts) {
        dec.push(cj, LinearForm::new(vec![Scalar::one(), t]))?;
    }
    dec.push(-top, LinearForm::from_ints(&[0, 1]))?;
    Ok(dec.pruned())
}

/// Shape `x_b^m · x_{i_1} ⋯ x_{i_k}` of a supported monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialShape {
    pub base: usize,
    pub m: u32,
    pub rest: Vec<usize>,
}

impl MonomialShape {
    pub fn of(exps: &ExponentVector) -> Result<Self> {
        let e = exps.exps();
        let repeated: Vec<usize> = (0..e.len()).filter(|&i| e[i] >= 2).collect();
        let base = match repeated.as_slice() {
            [] => (0..e.len())
                .find(|&i| e[i] == 1)
                .ok_or_else(|| Error::InvalidArgument("monomial of degree 0".into()))?,
            [b] => *b,
            _ => return Err(Error::UnsupportedShape(e.to_vec())),
        };
        let rest = (0..e.len()).filter(|&i| i != base && e[i] == 1).collect();
        Ok(MonomialShape { base, m: e[base], rest })
    }

    pub fn k(&self) -> u32 {
        self.rest.len() as u32
    }

    /// Term count of the Fischer-then-binary construction.
    pub fn strategy_a_count(&self) -> usize {
        let k = self.k();
        if k == 0 {
            return 1;
        }
        let binary = if self.m.min(k) == 0 { 1 } else { self.m.max(k) as usize + 1 };
        (1usize << (k - 1)) * binary
    }

    /// Term count of plain Fischer over all variables, when applicable.
    pub fn strategy_b_count(&self) -> Option<usize> {
        (self.m <= 1).then(|| 1usize << (self.m + self.k() - 1))
    }

    /// True when the plain Fischer certificate is chosen.
    pub fn prefers_b(&self) -> bool {
        self.strategy_b_count().is_some_and(|b| b <= self.strategy_a_count())
    }

    pub fn term_count(&self) -> usize {
        if self.prefers_b() {
            self.strategy_b_count().unwrap_or(usize::MAX)
        } else {
            self.strategy_a_count()
        }
    }
}

/// Term count [`monomial_decompose`] would produce, without building it.
pub fn monomial_term_count(exps: &ExponentVector) -> Result<usize> {
    Ok(MonomialShape::of(exps)?.term_count())
}

/// Waring certificate for `x_b^m x_{i_1} ⋯ x_{i_k}`: the smaller of
/// (A) Fischer on the squarefree part followed by a binary decomposition of
/// each `x_b^m ℓ^k`, and (B) plain Fischer on all variables when `m ≤ 1`.
pub fn monomial_decompose(exps: &ExponentVector) -> Result<SymmetricDecomposition> {
    let shape = MonomialShape::of(exps)?;
    let d = exps.num_vars();
    let target = HomogeneousPolynomial::monomial(exps.clone());
    if shape.k() == 0 {
        let mut dec = SymmetricDecomposition::new(shape.m, d);
        dec.push(Scalar::one(), LinearForm::var(d, shape.base))?;
        dec.verify(&target, 0.0)?;
        return Ok(dec);
    }
    if shape.prefers_b() {
        return fischer_decompose(exps);
    }
    let squarefree = ExponentVector::from_vars(d, &shape.rest);
    let outer = fischer_decompose(&squarefree)?;
    let (m, k) = (shape.m, shape.k());
    let binary = binary_monomial_decompose(m.max(k), m.min(k))?;
    let base = LinearForm::var(d, shape.base);
    let mut dec = SymmetricDecomposition::new(m + k, d);
    for outer_term in &outer.terms {
        // (X, Y) of the binary certificate in terms of the full variables.
        let (x, y) = if m >= k {
            (&base, &outer_term.form)
        } else {
            (&outer_term.form, &base)
        };
        let images = [x.clone(), y.clone()];
        for t in binary.substitute(&images)?.terms {
            dec.push(&outer_term.weight * &t.weight, t.form)?;
        }
    }
    dec.verify(&target, FLOAT_CERT_TOL)?;
    Ok(dec)
}
