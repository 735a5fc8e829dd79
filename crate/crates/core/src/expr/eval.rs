//! Exact-first evaluation.
//!
//! Values stay exact rationals until a function application has an irrational
//! image; from then on they are high-precision approximations (see
//! [`super::precise`]) that are only rounded to `f64` at the very end.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use super::precise::{self, ExpOutcome};
use super::{Expr, FuncKind, Rational, Var};
use crate::scalar::{rational_to_f64, serialize_f64, RationalJson};

/// Result of evaluating an expression at a point.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalResult {
    Exact(Rational),
    Approx(f64),
    PlusInfinity,
    MinusInfinity,
    Undefined(String),
}

impl EvalResult {
    pub fn is_exact_zero(&self) -> bool {
        matches!(self, EvalResult::Exact(r) if r.is_zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            EvalResult::Exact(r) => rational_to_f64(r),
            EvalResult::Approx(v) => *v,
            EvalResult::PlusInfinity => f64::INFINITY,
            EvalResult::MinusInfinity => f64::NEG_INFINITY,
            EvalResult::Undefined(_) => f64::NAN,
        }
    }
}

impl Serialize for EvalResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            EvalResult::Exact(r) => RationalJson(r).serialize(s),
            EvalResult::Approx(v) => serialize_f64(*v, s),
            EvalResult::PlusInfinity => s.serialize_str("inf"),
            EvalResult::MinusInfinity => s.serialize_str("-inf"),
            EvalResult::Undefined(why) => s.serialize_str(&format!("undefined: {why}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable '{0}' is not bound")]
    Unbound(Var),
}

/// Internal numeric value: exact, or a rounded high-precision approximation.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Num {
    Exact(Rational),
    Approx(Rational),
}

impl Num {
    pub fn value(&self) -> &Rational {
        match self {
            Num::Exact(r) | Num::Approx(r) => r,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Num::Exact(_))
    }

    fn with(&self, other: &Num, r: Rational) -> Num {
        if self.is_exact() && other.is_exact() {
            Num::Exact(r)
        } else {
            Num::Approx(precise::round(&r))
        }
    }

    fn map(&self, r: Rational, exact: bool) -> Num {
        if self.is_exact() && exact {
            Num::Exact(r)
        } else {
            Num::Approx(precise::round(&r))
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(self.value())
    }
}

/// Why a numeric evaluation stopped.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Fault {
    DivZero,
    Domain(String),
    Unbound(Var),
}

/// Variable bindings for [`eval`].
#[derive(Debug, Clone, Default)]
pub struct Env {
    values: BTreeMap<Var, Num>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    /// Binds `v` to an exact value.
    pub fn with(mut self, v: Var, r: Rational) -> Self {
        self.values.insert(v, Num::Exact(r));
        self
    }

    pub fn with_int(self, v: Var, n: i64) -> Self {
        self.with(v, Rational::from_integer(BigInt::from(n)))
    }

    /// Binds `x` and `y`.
    pub fn xy(x: Rational, y: Rational) -> Self {
        Env::new().with(Var::X, x).with(Var::Y, y)
    }

    fn get(&self, v: Var) -> Option<&Num> {
        self.values.get(&v)
    }
}

/// Evaluates `e` under `env`, exactly when possible.
pub fn eval(e: &Expr, env: &Env) -> Result<EvalResult, EvalError> {
    match eval_num(e, env) {
        Ok(Num::Exact(r)) => Ok(EvalResult::Exact(r)),
        Ok(Num::Approx(r)) => {
            let v = rational_to_f64(&r);
            Ok(if v == f64::INFINITY {
                EvalResult::PlusInfinity
            } else if v == f64::NEG_INFINITY {
                EvalResult::MinusInfinity
            } else {
                EvalResult::Approx(v)
            })
        }
        Err(Fault::DivZero) => Ok(EvalResult::Undefined("div0".into())),
        Err(Fault::Domain(why)) => Ok(EvalResult::Undefined(why)),
        Err(Fault::Unbound(v)) => Err(EvalError::Unbound(v)),
    }
}

const OVERFLOW_BITS: usize = 4096;

/// Largest bit size an exact power may reach before it is approximated.
const EXACT_POW_BITS: u64 = 1 << 16;

pub(crate) fn eval_num(e: &Expr, env: &Env) -> Result<Num, Fault> {
    match e {
        Expr::Const(c) => Ok(Num::Exact(c.clone())),
        Expr::Var(v) => env.get(*v).cloned().ok_or(Fault::Unbound(*v)),
        Expr::Add(xs) => {
            let mut acc = Num::Exact(Rational::zero());
            for x in xs {
                let t = eval_num(x, env)?;
                acc = acc.with(&t, acc.value() + t.value());
            }
            Ok(acc)
        }
        Expr::Mul(xs) => {
            // evaluate every factor first so a zero factor cannot hide a fault
            let mut acc = Num::Exact(Rational::one());
            for x in xs {
                let t = eval_num(x, env)?;
                acc = acc.with(&t, acc.value() * t.value());
            }
            Ok(acc)
        }
        Expr::Neg(a) => {
            let a = eval_num(a, env)?;
            Ok(a.map(-a.value(), true))
        }
        Expr::Div(a, b) => {
            let a = eval_num(a, env)?;
            let b = eval_num(b, env)?;
            if b.value().is_zero() {
                return Err(Fault::DivZero);
            }
            Ok(a.with(&b, a.value() / b.value()))
        }
        Expr::Pow(b, n) => {
            let b = eval_num(b, env)?;
            pow_num(&b, *n)
        }
        Expr::Func(kind, a) => {
            let a = eval_num(a, env)?;
            apply_func(*kind, &a)
        }
    }
}

fn pow_num(b: &Num, n: i64) -> Result<Num, Fault> {
    if n == 0 {
        return Ok(Num::Exact(Rational::one()));
    }
    let base = b.value();
    if base.is_zero() && n < 0 {
        return Err(Fault::DivZero);
    }
    let bits = base.numer().bits().max(base.denom().bits());
    let exact = b.is_exact() && bits.saturating_mul(n.unsigned_abs()) <= EXACT_POW_BITS;
    let mag = n.unsigned_abs();
    let raised = if exact {
        num_traits::pow(base.clone(), mag as usize)
    } else {
        // square-and-multiply with rounding keeps sizes bounded
        let mut result = Rational::one();
        let mut sq = precise::round(base);
        let mut k = mag;
        while k > 0 {
            if k & 1 == 1 {
                result = precise::round(&(result * &sq));
            }
            sq = precise::round(&(&sq * &sq));
            k >>= 1;
        }
        result
    };
    let raised = if n < 0 { raised.recip() } else { raised };
    Ok(if exact {
        Num::Exact(raised)
    } else {
        Num::Approx(precise::round(&raised))
    })
}

fn apply_func(kind: FuncKind, a: &Num) -> Result<Num, Fault> {
    let v = a.value();
    match kind {
        FuncKind::Sqrt => match precise::sqrt(v) {
            Some((r, exact)) => Ok(a.map(r, exact)),
            None => Err(Fault::Domain("sqrt of a negative value".into())),
        },
        FuncKind::Ln => match precise::ln(v) {
            Some((r, exact)) => Ok(a.map(r, exact)),
            None if v.is_zero() => Err(Fault::Domain("ln(0)".into())),
            None => Err(Fault::Domain("ln of a negative value".into())),
        },
        FuncKind::Exp => match precise::exp(v) {
            ExpOutcome::Value(r, exact) => Ok(a.map(r, exact)),
            // stand-in magnitude far beyond f64 range so signs and products still work out
            ExpOutcome::Overflow => Ok(Num::Approx(Rational::from_integer(BigInt::one() << OVERFLOW_BITS))),
        },
        FuncKind::Sin => {
            let (r, exact) = precise::sin(v);
            Ok(a.map(r, exact))
        }
        FuncKind::Cos => {
            let (r, exact) = precise::cos(v);
            Ok(a.map(r, exact))
        }
        FuncKind::Arctan => {
            let (r, exact) = precise::arctan(v);
            Ok(a.map(r, exact))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, simplify};

    fn at(text: &str, x: i64, y: i64) -> EvalResult {
        let env = Env::new().with_int(Var::X, x).with_int(Var::Y, y);
        eval(&parse(text).unwrap(), &env).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn worked_example_is_zero_over_zero() {
        assert_eq!(at("x^2+2*x*y-3*y^2", 1, 1), EvalResult::Exact(q(0)));
        assert_eq!(at("x^3-y^3", 1, 1), EvalResult::Exact(q(0)));
    }

    #[test]
    fn division_by_exact_zero_is_undefined() {
        assert_eq!(at("1/x", 0, 0), EvalResult::Undefined("div0".into()));
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let env = Env::new().with_int(Var::X, 1);
        assert_eq!(eval(&parse("x+y").unwrap(), &env), Err(EvalError::Unbound(Var::Y)));
    }

    #[test]
    fn exactness_follows_function_images() {
        assert_eq!(at("sqrt(x^2+y^2)", 3, 4), EvalResult::Exact(q(5)));
        assert_eq!(at("ln(x)+sin(y)", 1, 0), EvalResult::Exact(q(0)));
        assert!(matches!(at("sqrt(x)", 2, 0), EvalResult::Approx(v) if (v - 2f64.sqrt()).abs() < 1e-15));
        assert!(matches!(at("ln(x)", -1, 0), EvalResult::Undefined(_)));
    }

    #[test]
    fn exp_overflow_maps_to_infinity() {
        assert_eq!(at("exp(x)", 10_000_000, 0), EvalResult::PlusInfinity);
        assert_eq!(at("-exp(x)", 10_000_000, 0), EvalResult::MinusInfinity);
        assert_eq!(at("exp(x)^100", 1000, 0), EvalResult::PlusInfinity);
    }

    #[test]
    fn simplification_preserves_values() {
        let e = parse("(x+y)^2/(x-2*y) - sqrt(x*y+1)*(x-y)").unwrap();
        let env = Env::xy(Rational::new(3.into(), 7.into()), Rational::new(5.into(), 2.into()));
        let a = eval(&e, &env).unwrap().to_f64();
        let b = eval(&simplify(&e), &env).unwrap().to_f64();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}
