//! Finite numeric values that remember whether they are exact.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::expr::Rational;

/// Absolute threshold under which an approximate value is treated as zero.
pub const FLOAT_ZERO: f64 = 1e-9;

/// Relative tolerance for comparing approximate values.
pub const FLOAT_REL_EQ: f64 = 1e-9;

/// A finite value: an exact rational or a float approximation.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Approx(f64),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Exact zero, or an approximation within [`FLOAT_ZERO`] of zero.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(v) => v.abs() < FLOAT_ZERO,
        }
    }

    /// True when the value was judged zero only through the float threshold.
    pub fn is_float_zero(&self) -> bool {
        matches!(self, Scalar::Approx(v) if v.abs() < FLOAT_ZERO)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Approx(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Approx(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Approx(self.to_f64() * other.to_f64()),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Approx(v) => Scalar::Approx(-v),
        }
    }

    /// Quotient; `None` when the divisor is zero in the [`Scalar::is_zero`] sense.
    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        if other.is_zero() {
            return None;
        }
        Some(match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Approx(self.to_f64() / other.to_f64()),
        })
    }

    pub fn recip(&self) -> Option<Scalar> {
        Scalar::int(1).div(self)
    }

    /// Exact equality for exact pairs, relative tolerance otherwise.
    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                let scale = 1f64.max(a.abs()).max(b.abs());
                (a - b).abs() <= FLOAT_REL_EQ * scale
            }
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", format_rational(r)),
            Scalar::Approx(v) => write!(f, "≈{v}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => RationalJson(r).serialize(s),
            Scalar::Approx(v) => serialize_f64(*v, s),
        }
    }
}

/// Floats serialize as numbers; non-finite values as the strings `"inf"`, `"-inf"`, `"nan"`.
pub fn serialize_f64<S: Serializer>(v: f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Serializes a rational as `{"num": "...", "den": "..."}`.
pub struct RationalJson<'a>(pub &'a Rational);

impl Serialize for RationalJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("num", &self.0.numer().to_string())?;
        st.serialize_field("den", &self.0.denom().to_string())?;
        st.end()
    }
}

pub fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    RationalJson(r).serialize(s)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `"4/3"`, `"-10"`, `"0"`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"3"`, `"-4/3"`, `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return None;
        }
        let whole: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().ok()?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().ok()?;
        let mag = Rational::new(whole * &scale + frac, scale);
        return Some(if negative { -mag } else { mag });
    }
    let n: BigInt = t.parse().ok()?;
    Some(Rational::from_integer(n))
}
