//! Expression trees over the variables `x`, `y` (and the internal `u`, `v`).
//!
//! Trees are immutable values. The parser produces raw trees that mirror the
//! input text; [`simplify`] rewrites them into a canonical form in which `Neg`
//! and `Div` no longer appear, sums and products are flat and sorted, and like
//! monomials are combined.

mod eval;
mod format;
mod parse;
pub(crate) mod poly;
pub(crate) mod precise;
mod simplify;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

pub use eval::{eval, Env, EvalError, EvalResult};
pub(crate) use eval::{eval_num, Fault, Num};
pub use format::format;
pub use parse::{parse, parse_internal, ParseError, ParseErrorKind};
pub use poly::clear_denominators;
pub use simplify::{simplify, Simplifier, DEFAULT_EXPAND_DEGREE};

/// Exact rational number in canonical form (positive denominator, reduced).
pub type Rational = num_rational::BigRational;

/// The variables an expression may mention.
///
/// `X` and `Y` are the user-facing coordinates; `U` and `V` stand for `1/x` and
/// `1/y` after a point at infinity has been moved to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    X,
    Y,
    U,
    V,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::X, Var::Y, Var::U, Var::V];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::U => "u",
            Var::V => "v",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "u" => Some(Var::U),
            "v" => Some(Var::V),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FuncKind {
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Arctan,
}

impl FuncKind {
    pub const ALL: [FuncKind; 6] = [
        FuncKind::Sqrt,
        FuncKind::Exp,
        FuncKind::Ln,
        FuncKind::Sin,
        FuncKind::Cos,
        FuncKind::Arctan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FuncKind::Sqrt => "sqrt",
            FuncKind::Exp => "exp",
            FuncKind::Ln => "ln",
            FuncKind::Sin => "sin",
            FuncKind::Cos => "cos",
            FuncKind::Arctan => "arctan",
        }
    }

    pub fn from_name(name: &str) -> Option<FuncKind> {
        FuncKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// An expression tree node.
///
/// The derived ordering (variant order first, then contents) is the fixed
/// structural order used when canonical forms need a tie-break.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(Rational),
    Var(Var),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Func(FuncKind, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rat(r: Rational) -> Expr {
        Expr::Const(r)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::Var(Var::Y)
    }

    pub fn pow(self, n: i64) -> Expr {
        Expr::Pow(Box::new(self), n)
    }

    pub fn func(kind: FuncKind, arg: Expr) -> Expr {
        Expr::Func(kind, Box::new(arg))
    }

    pub fn sqrt(arg: Expr) -> Expr {
        Expr::func(FuncKind::Sqrt, arg)
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if num_traits::Zero::is_zero(c))
    }

    /// Children in tree order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Var(_) => vec![],
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().collect(),
            Expr::Pow(b, _) | Expr::Neg(b) | Expr::Func(_, b) => vec![b],
            Expr::Div(a, b) => vec![a, b],
        }
    }

    /// Whether `v` occurs anywhere in the tree.
    pub fn contains_var(&self, v: Var) -> bool {
        match self {
            Expr::Var(w) => *w == v,
            _ => self.children().into_iter().any(|c| c.contains_var(v)),
        }
    }

    /// Whether any function application occurs in the tree.
    pub fn contains_func(&self) -> bool {
        match self {
            Expr::Func(..) => true,
            _ => self.children().into_iter().any(Expr::contains_func),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(self))
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(self))
    }
}

// Raw (unsimplified) builders for assembling trees in code.
impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, Expr::Neg(Box::new(rhs))])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Simultaneous substitution of variables by expressions, followed by simplification.
pub fn substitute(e: &Expr, bindings: &BTreeMap<Var, Expr>) -> Expr {
    simplify(&substitute_raw(e, bindings))
}

pub(crate) fn substitute_raw(e: &Expr, bindings: &BTreeMap<Var, Expr>) -> Expr {
    match e {
        Expr::Var(v) => bindings.get(v).cloned().unwrap_or_else(|| e.clone()),
        Expr::Const(_) => e.clone(),
        Expr::Add(xs) => Expr::Add(xs.iter().map(|c| substitute_raw(c, bindings)).collect()),
        Expr::Mul(xs) => Expr::Mul(xs.iter().map(|c| substitute_raw(c, bindings)).collect()),
        Expr::Pow(b, n) => Expr::Pow(Box::new(substitute_raw(b, bindings)), *n),
        Expr::Neg(a) => Expr::Neg(Box::new(substitute_raw(a, bindings))),
        Expr::Div(a, b) => Expr::Div(
            Box::new(substitute_raw(a, bindings)),
            Box::new(substitute_raw(b, bindings)),
        ),
        Expr::Func(k, a) => Expr::Func(*k, Box::new(substitute_raw(a, bindings))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_into_reciprocals() {
        let mut b = BTreeMap::new();
        b.insert(Var::X, Expr::int(1) / Expr::var(Var::U));
        b.insert(Var::Y, Expr::int(1) / Expr::var(Var::V));
        let e = substitute(&(Expr::x() * Expr::y()), &b);
        assert_eq!(format(&e), "1/(u*v)");
    }

    #[test]
    fn empty_substitution_is_identity() {
        let e = substitute(&Expr::x(), &BTreeMap::new());
        assert_eq!(e, Expr::x());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let mut b = BTreeMap::new();
        b.insert(Var::X, Expr::y());
        b.insert(Var::Y, Expr::x());
        let e = parse("x - 2*y").unwrap();
        assert_eq!(substitute(&e, &b), simplify(&parse("y - 2*x").unwrap()));
    }
}
