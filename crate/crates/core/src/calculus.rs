//! Symbolic partial derivatives, derivative tensors at a point, and the
//! infinitesimal order of a function at a point.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::expr::{eval_num, simplify, Env, Expr, Fault, FuncKind, Num, Rational, Var};
use crate::scalar::{format_rational, parse_rational, rational_to_f64, RationalJson, Scalar};

/// One coordinate of a limit point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Coord {
    Finite(Rational),
    PlusInfinity,
    MinusInfinity,
    /// Unsigned infinity: the coordinate may escape in either direction.
    Infinity,
}

impl Coord {
    pub fn int(n: i64) -> Coord {
        Coord::Finite(Rational::from_integer(n.into()))
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self, Coord::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Coord::Finite(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Finite(r) => f.write_str(&format_rational(r)),
            Coord::PlusInfinity => f.write_str("+inf"),
            Coord::MinusInfinity => f.write_str("-inf"),
            Coord::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Coord::Finite(r) => RationalJson(r).serialize(s),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl FromStr for Coord {
    type Err = PointParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text.trim() {
            "inf" | "oo" => Ok(Coord::Infinity),
            "+inf" | "+oo" => Ok(Coord::PlusInfinity),
            "-inf" | "-oo" => Ok(Coord::MinusInfinity),
            t => parse_rational(t)
                .map(Coord::Finite)
                .ok_or_else(|| PointParseError(format!("invalid coordinate '{t}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct PointParseError(String);

/// The point `(x0, y0)` a limit is taken at.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LimitPoint {
    pub x: Coord,
    pub y: Coord,
}

impl LimitPoint {
    pub fn new(x: Coord, y: Coord) -> Self {
        LimitPoint { x, y }
    }

    pub fn finite(x: Rational, y: Rational) -> Self {
        LimitPoint::new(Coord::Finite(x), Coord::Finite(y))
    }

    pub fn ints(x: i64, y: i64) -> Self {
        LimitPoint::new(Coord::int(x), Coord::int(y))
    }

    pub fn origin() -> Self {
        LimitPoint::ints(0, 0)
    }

    /// Both coordinates unsigned infinity.
    pub fn infinity() -> Self {
        LimitPoint::new(Coord::Infinity, Coord::Infinity)
    }

    pub fn is_infinite(&self) -> bool {
        self.x.is_infinite() || self.y.is_infinite()
    }

    pub fn finite_coords(&self) -> Option<(Rational, Rational)> {
        Some((self.x.finite()?.clone(), self.y.finite()?.clone()))
    }
}

impl fmt::Display for LimitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Accepts `"x0,y0"` or a single infinity token applied to both coordinates.
impl FromStr for LimitPoint {
    type Err = PointParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let t = text.trim().trim_start_matches('(').trim_end_matches(')');
        match t.split_once(',') {
            Some((a, b)) => Ok(LimitPoint::new(a.parse()?, b.parse()?)),
            None => {
                let c: Coord = t.parse()?;
                if c.is_infinite() {
                    Ok(LimitPoint::new(c.clone(), c))
                } else {
                    Err(PointParseError(format!(
                        "expected \"x0,y0\" or an infinity token, got '{t}'"
                    )))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("derivatives need a finite point, got {0}")]
    InfinitePoint(Box<LimitPoint>),
}

/// Symbolic partial derivative of `e` with respect to `v`, simplified.
pub fn partial(e: &Expr, v: Var) -> Expr {
    simplify(&diff(e, v))
}

fn diff(e: &Expr, v: Var) -> Expr {
    if !e.contains_var(v) {
        return Expr::int(0);
    }
    match e {
        Expr::Const(_) => Expr::int(0),
        Expr::Var(w) => Expr::int(if *w == v { 1 } else { 0 }),
        Expr::Add(xs) => Expr::Add(xs.iter().map(|x| diff(x, v)).collect()),
        Expr::Mul(xs) => {
            let mut terms = Vec::new();
            for (i, x) in xs.iter().enumerate() {
                if !x.contains_var(v) {
                    continue;
                }
                let mut factors: Vec<Expr> = xs.clone();
                factors[i] = diff(x, v);
                terms.push(Expr::Mul(factors));
            }
            Expr::Add(terms)
        }
        Expr::Pow(b, n) => Expr::Mul(vec![Expr::int(*n), Expr::Pow(b.clone(), n - 1), diff(b, v)]),
        Expr::Neg(a) => Expr::Neg(Box::new(diff(a, v))),
        Expr::Div(a, b) => {
            let top = Expr::Add(vec![
                Expr::Mul(vec![diff(a, v), (**b).clone()]),
                Expr::Neg(Box::new(Expr::Mul(vec![(**a).clone(), diff(b, v)]))),
            ]);
            Expr::Div(Box::new(top), Box::new(Expr::Pow(b.clone(), 2)))
        }
        Expr::Func(kind, a) => {
            let inner = diff(a, v);
            let a = (**a).clone();
            let outer = match kind {
                FuncKind::Sqrt => Expr::Pow(Box::new(Expr::Mul(vec![Expr::int(2), Expr::sqrt(a)])), -1),
                FuncKind::Exp => Expr::func(FuncKind::Exp, a),
                FuncKind::Ln => Expr::Pow(Box::new(a), -1),
                FuncKind::Sin => Expr::func(FuncKind::Cos, a),
                FuncKind::Cos => Expr::Neg(Box::new(Expr::func(FuncKind::Sin, a))),
                FuncKind::Arctan => Expr::Pow(Box::new(Expr::Add(vec![Expr::int(1), Expr::Pow(Box::new(a), 2)])), -1),
            };
            Expr::Mul(vec![outer, inner])
        }
    }
}

/// Where derivatives are taken: two differentiation variables and their values.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Site {
    pub axes: (Var, Var),
    pub at: (Rational, Rational),
}

impl Site {
    pub fn xy(p: &LimitPoint) -> Result<Site, CalculusError> {
        let (x, y) = p
            .finite_coords()
            .ok_or_else(|| CalculusError::InfinitePoint(Box::new(p.clone())))?;
        Ok(Site {
            axes: (Var::X, Var::Y),
            at: (x, y),
        })
    }

    pub fn env(&self) -> Env {
        Env::new()
            .with(self.axes.0, self.at.0.clone())
            .with(self.axes.1, self.at.1.clone())
    }

    /// The site shifted by `(dx, dy)`.
    fn offset(&self, dx: &Rational, dy: &Rational) -> Site {
        Site {
            axes: self.axes,
            at: (&self.at.0 + dx, &self.at.1 + dy),
        }
    }
}

/// Memoized mixed partials `∂^(a+b) e / ∂x^a ∂y^b`, differentiating in `x` first.
#[derive(Debug, Clone)]
pub(crate) struct PartialTable {
    axes: (Var, Var),
    cache: BTreeMap<(u32, u32), Expr>,
}

impl PartialTable {
    pub fn new(e: &Expr, axes: (Var, Var)) -> Self {
        let mut cache = BTreeMap::new();
        cache.insert((0, 0), simplify(e));
        PartialTable { axes, cache }
    }

    pub fn base(&self) -> &Expr {
        &self.cache[&(0, 0)]
    }

    pub fn get(&mut self, a: u32, b: u32) -> Expr {
        if let Some(e) = self.cache.get(&(a, b)) {
            return e.clone();
        }
        let e = if b > 0 {
            partial(&self.get(a, b - 1), self.axes.1)
        } else {
            partial(&self.get(a - 1, 0), self.axes.0)
        };
        self.cache.insert((a, b), e.clone());
        e
    }

    /// The same mixed partial computed with the `y` derivatives taken first.
    fn get_y_first(&mut self, a: u32, b: u32) -> Expr {
        let mut e = self.get(0, b);
        for _ in 0..a {
            e = partial(&e, self.axes.0);
        }
        e
    }
}

/// All order-`n` partial derivatives of one function at a point.
///
/// `entries[i]` is `∂ⁿf/∂x^(n-i)∂y^i`, so order 1 reads `[f_x, f_y]` and
/// order 2 reads `[f_xx, f_xy, f_yy]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeTensor {
    pub order: u32,
    pub entries: Vec<Scalar>,
    /// Whether mixed partials agreed when taken in either order.
    pub mixed_symmetric: bool,
    /// Whether any entry is a float approximation.
    pub approximate: bool,
}

impl DerivativeTensor {
    /// At least one entry is nonzero (the `dⁿf ≠ 0` predicate).
    pub fn is_nonzero(&self) -> bool {
        self.entries.iter().any(|e| !e.is_zero())
    }

    /// Every entry is nonzero (the stronger hypothesis of the ratio theorems).
    pub fn all_nonzero(&self) -> bool {
        self.entries.iter().all(|e| !e.is_zero())
    }

    /// Some entry was judged zero only through the float threshold.
    pub fn has_float_zero(&self) -> bool {
        self.entries.iter().any(Scalar::is_float_zero)
    }

    /// Entry for `∂ⁿ/∂x^l ∂y^(n-l)`.
    pub fn entry(&self, l: u32) -> &Scalar {
        &self.entries[(self.order - l) as usize]
    }

    /// Value of `Σ C(n,i) e_i r^i`, the `n`-th directional coefficient along `(1, r)`.
    pub fn directional(&self, dx: &Rational, dy: &Rational) -> Scalar {
        let n = self.order as usize;
        let mut acc = Scalar::int(0);
        let mut binom = Rational::one();
        for (i, e) in self.entries.iter().enumerate() {
            let weight = &binom * num_traits::pow(dx.clone(), n - i) * num_traits::pow(dy.clone(), i);
            acc = acc.add(&e.mul(&Scalar::Exact(weight)));
            binom = binom * Rational::from_integer((n - i).into()) / Rational::from_integer((i + 1).into());
        }
        acc
    }
}

pub(crate) fn value_at(e: &Expr, site: &Site) -> Result<Scalar, CalculusError> {
    match eval_num(e, &site.env()) {
        Ok(Num::Exact(r)) => Ok(Scalar::Exact(r)),
        Ok(Num::Approx(r)) => {
            let v = rational_to_f64(&r);
            if v.is_finite() {
                Ok(Scalar::Approx(v))
            } else {
                Err(CalculusError::Domain(format!("{e} overflows at the point")))
            }
        }
        Err(Fault::DivZero) => Err(CalculusError::Domain(format!("{e} divides by zero at the point"))),
        Err(Fault::Domain(why)) => Err(CalculusError::Domain(format!("{why} in {e}"))),
        Err(Fault::Unbound(v)) => Err(CalculusError::Domain(format!("unbound variable {v}"))),
    }
}

pub(crate) fn tensor_at(table: &mut PartialTable, site: &Site, n: u32) -> Result<DerivativeTensor, CalculusError> {
    let mut entries = Vec::with_capacity(n as usize + 1);
    for i in 0..=n {
        let d = table.get(n - i, i);
        entries.push(value_at(&d, site)?);
    }
    let mut mixed_symmetric = true;
    if n >= 2 {
        for i in 1..n {
            let a = table.get(n - i, i);
            let b = table.get_y_first(n - i, i);
            if a != b && !numerically_equal(&a, &b, site) {
                mixed_symmetric = false;
            }
        }
    }
    let approximate = entries.iter().any(|e| !e.is_exact());
    Ok(DerivativeTensor {
        order: n,
        entries,
        mixed_symmetric,
        approximate,
    })
}

/// Compares two expressions at the site and at three nearby points.
fn numerically_equal(a: &Expr, b: &Expr, site: &Site) -> bool {
    let h = Rational::new(1.into(), 1000.into());
    let offsets = [
        (Rational::zero(), Rational::zero()),
        (h.clone(), Rational::zero()),
        (Rational::zero(), h.clone()),
        (h.clone(), -h.clone()),
    ];
    offsets.iter().all(|(dx, dy)| {
        let s = site.offset(dx, dy);
        match (value_at(a, &s), value_at(b, &s)) {
            (Ok(x), Ok(y)) => x.approx_eq(&y),
            (Err(_), Err(_)) => true,
            _ => false,
        }
    })
}

/// The order-`n` derivative tensor of `e` at the finite point `p`.
pub fn derivative_tensor(e: &Expr, p: &LimitPoint, n: u32) -> Result<DerivativeTensor, CalculusError> {
    let site = Site::xy(p)?;
    let mut table = PartialTable::new(e, site.axes);
    tensor_at(&mut table, &site, n.max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum OrderKind {
    FirstOrder,
    OrderN(u32),
    /// The value at the point is nonzero.
    NotInfinitesimal(Scalar),
    /// Every tensor up to the given order vanished.
    OrderExceedsMax(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderClassification {
    pub kind: OrderKind,
    /// The first nonvanishing tensor, for `FirstOrder` and `OrderN`.
    pub witness: Option<DerivativeTensor>,
    /// Some zero test relied on the float threshold.
    pub float_zero: bool,
}

impl OrderClassification {
    /// The infinitesimal order, when one was found.
    pub fn order(&self) -> Option<u32> {
        match self.kind {
            OrderKind::FirstOrder => Some(1),
            OrderKind::OrderN(n) => Some(n),
            _ => None,
        }
    }
}

pub(crate) fn classify_at(
    table: &mut PartialTable,
    site: &Site,
    n_max: u32,
) -> Result<OrderClassification, CalculusError> {
    let value = value_at(&table.base().clone(), site)?;
    let mut float_zero = value.is_float_zero();
    if !value.is_zero() {
        return Ok(OrderClassification {
            kind: OrderKind::NotInfinitesimal(value),
            witness: None,
            float_zero,
        });
    }
    for n in 1..=n_max.max(1) {
        let t = tensor_at(table, site, n)?;
        float_zero |= t.has_float_zero();
        if t.is_nonzero() {
            let kind = if n == 1 {
                OrderKind::FirstOrder
            } else {
                OrderKind::OrderN(n)
            };
            return Ok(OrderClassification {
                kind,
                witness: Some(t),
                float_zero,
            });
        }
    }
    Ok(OrderClassification {
        kind: OrderKind::OrderExceedsMax(n_max),
        witness: None,
        float_zero,
    })
}

/// Classifies `e` as an infinitesimal of some order at the finite point `p`.
pub fn classify_order(e: &Expr, p: &LimitPoint, n_max: u32) -> Result<OrderClassification, CalculusError> {
    let site = Site::xy(p)?;
    let mut table = PartialTable::new(e, site.axes);
    classify_at(&mut table, &site, n_max)
}
