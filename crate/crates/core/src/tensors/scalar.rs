//! Amplitude and coefficient values.
//!
//! A [`Scalar`] is either an exact rational (arbitrary precision, always in
//! lowest terms) or a complex double. Arithmetic between two rationals stays
//! exact; any operation that touches a complex value produces a complex value.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Complex(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn big_int(n: BigInt) -> Self {
        Scalar::Rational(BigRational::from_integer(n))
    }

    /// `num / den` in lowest terms. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Complex(Complex64::new(re, im))
    }

    pub fn from_c64(z: Complex64) -> Self {
        Scalar::Complex(z)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Complex(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Complex(_) => None,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Rational(q) => Complex64::new(rational_to_f64(q), 0.0),
            Scalar::Complex(z) => *z,
        }
    }

    /// Same value carried in the float backend.
    pub fn to_complex(&self) -> Scalar {
        Scalar::Complex(self.to_c64())
    }

    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Rational(q) => rational_to_f64(&q.abs()),
            Scalar::Complex(z) => z.norm(),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Rational(_) => self.clone(),
            Scalar::Complex(z) => Scalar::Complex(z.conj()),
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::Singular);
        }
        Ok(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Complex(z) => Scalar::Complex(z.inv()),
        })
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(num_traits::pow(q.clone(), exp as usize)),
            Scalar::Complex(z) => Scalar::Complex(z.powu(exp)),
        }
    }

    /// Parses `"p/q"` or `"p"`.
    pub fn parse_rational(text: &str) -> Result<Scalar> {
        let text = text.trim();
        let parse = |s: &str| {
            s.trim()
                .parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("bad rational {text:?}: {e}")))
        };
        match text.split_once('/') {
            Some((n, d)) => {
                let den = parse(d)?;
                if den.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {text:?}")));
                }
                Ok(Scalar::Rational(BigRational::new(parse(n)?, den)))
            }
            None => Ok(Scalar::big_int(parse(text)?)),
        }
    }

    fn binary(
        &self,
        other: &Scalar,
        exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        float: impl FnOnce(Complex64, Complex64) -> Complex64,
    ) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(exact(a, b)),
            _ => Scalar::Complex(float(self.to_c64(), other.to_c64())),
        }
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Numerator and denominator too large for a direct conversion.
    let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(900) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Rational(q)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Complex(z)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Complex(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $exact:expr, $float:expr) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.binary(rhs, $exact, $float)
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

impl_binop!(Add, add, |a, b| a + b, |a, b| a + b);
impl_binop!(Sub, sub, |a, b| a - b, |a, b| a - b);
impl_binop!(Mul, mul, |a, b| a * b, |a, b| a * b);
impl_binop!(Div, div, |a, b| a / b, |a, b| a / b);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Complex(z) => Scalar::Complex(-z),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// Wire form: `{"q":"p/q"}` for rationals, `{"re":…,"im":…}` for complex values.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ScalarRepr {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub im: Option<f64>,
}

impl From<&Scalar> for ScalarRepr {
    fn from(s: &Scalar) -> Self {
        match s {
            Scalar::Rational(q) => ScalarRepr {
                q: Some(q.to_string()),
                ..Default::default()
            },
            Scalar::Complex(z) => ScalarRepr {
                q: None,
                re: Some(z.re),
                im: Some(z.im),
            },
        }
    }
}

impl TryFrom<&ScalarRepr> for Scalar {
    type Error = Error;
    fn try_from(r: &ScalarRepr) -> Result<Scalar> {
        match (&r.q, r.re, r.im) {
            (Some(q), None, None) => Scalar::parse_rational(q),
            (None, re, im) if re.is_some() || im.is_some() => {
                Ok(Scalar::complex(re.unwrap_or(0.0), im.unwrap_or(0.0)))
            }
            _ => Err(Error::Parse(
                "scalar needs either \"q\" or \"re\"/\"im\"".to_string(),
            )),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(de)?;
        Scalar::try_from(&repr).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_reduced() {
        let a = Scalar::ratio(2, 4);
        assert_eq!(a, Scalar::ratio(1, 2));
        let b = Scalar::ratio(3, -6);
        assert_eq!(format!("{b}"), "-1/2");
        assert!((a + b).is_zero());
    }

    #[test]
    fn mixing_backends_yields_complex() {
        let q = Scalar::ratio(1, 4);
        let z = Scalar::complex(0.0, 1.0);
        let p = &q * &z;
        assert!(!p.is_exact());
        assert_eq!(p.to_c64(), Complex64::new(0.0, 0.25));
        assert!((q.clone() * q).is_exact());
    }

    #[test]
    fn parse_and_wire_round_trip() {
        let s = Scalar::parse_rational(" -7/21 ").unwrap();
        assert_eq!(s, Scalar::ratio(-1, 3));
        assert!(Scalar::parse_rational("1/0").is_err());
        for v in [Scalar::ratio(-5, 9), Scalar::complex(0.5, -1e-300)] {
            let json = serde_json::to_string(&v).unwrap();
            let back: Scalar = serde_json::from_str(&json).unwrap();
            assert_eq!(v, back);
        }
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(10).pow(400);
        let q = BigRational::new(big.clone() * 3, big * 4);
        assert_eq!(rational_to_f64(&q), 0.75);
    }
}
