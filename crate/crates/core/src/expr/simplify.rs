//! Canonical simplification.
//!
//! Canonical trees use only `Const`, `Var`, `Add`, `Mul`, `Pow` and `Func`:
//! - `Neg(a)` becomes `Mul(-1, a)` and `Div(a, b)` becomes `Mul(a, Pow(b, -1))`.
//! - `Add` is flat, holds at most one constant (last), and its terms are sorted
//!   by descending total degree, then by exponents of x, y, u, v; like terms are
//!   combined through their monomial key.
//! - `Mul` is flat, holds at most one coefficient (first, never 0 or 1), and its
//!   factors are distinct bases with nonzero integer exponents.
//! - `Pow` has a non-constant base that is neither a `Mul` nor a `Pow`, and an
//!   exponent other than 0 and 1. The one exception is `Pow(0, n)` with `n < 0`,
//!   kept so that evaluation reports the division by zero.
//! - Products that contain a sum are distributed; products of several sums and
//!   positive powers of sums are expanded while the degree stays within the bound.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Expr, FuncKind, Rational};

/// Total degree up to which products and powers of sums are expanded.
pub const DEFAULT_EXPAND_DEGREE: u32 = 6;

/// Upper bound on the number of terms produced by a single expansion.
const MAX_EXPANDED_TERMS: usize = 512;

pub fn simplify(e: &Expr) -> Expr {
    Simplifier::default().simplify(e)
}

#[derive(Debug, Clone, Copy)]
pub struct Simplifier {
    pub expand_degree: u32,
}

impl Default for Simplifier {
    fn default() -> Self {
        Simplifier {
            expand_degree: DEFAULT_EXPAND_DEGREE,
        }
    }
}

impl Simplifier {
    pub fn with_expand_degree(expand_degree: u32) -> Self {
        Simplifier { expand_degree }
    }

    pub fn simplify(&self, e: &Expr) -> Expr {
        match e {
            Expr::Const(_) | Expr::Var(_) => e.clone(),
            Expr::Add(xs) => self.add(xs.iter().map(|x| self.simplify(x)).collect()),
            Expr::Mul(xs) => self.mul(xs.iter().map(|x| self.simplify(x)).collect()),
            Expr::Pow(b, n) => self.pow(self.simplify(b), *n),
            Expr::Neg(a) => self.mul(vec![Expr::int(-1), self.simplify(a)]),
            Expr::Div(a, b) => {
                let den = self.pow(self.simplify(b), -1);
                self.mul(vec![self.simplify(a), den])
            }
            Expr::Func(k, a) => self.func(*k, self.simplify(a)),
        }
    }

    /// Canonical sum of canonical terms.
    pub fn add(&self, terms: Vec<Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut monomials: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut stack = terms;
        while let Some(t) = stack.pop() {
            match t {
                Expr::Add(xs) => stack.extend(xs),
                Expr::Const(c) => constant += c,
                other => {
                    let (c, m) = split_coefficient(other);
                    *monomials.entry(m).or_insert_with(Rational::zero) += c;
                }
            }
        }
        let mut out: Vec<Expr> = monomials
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| with_coefficient(c, m))
            .collect();
        out.sort_by(term_order);
        if !constant.is_zero() {
            out.push(Expr::Const(constant));
        }
        match out.len() {
            0 => Expr::Const(Rational::zero()),
            1 => out.pop().unwrap(),
            _ => Expr::Add(out),
        }
    }

    /// Canonical product of canonical factors.
    pub fn mul(&self, factors: Vec<Expr>) -> Expr {
        let mut g = Grouping::new();
        for f in factors {
            g.absorb(f, 1);
        }
        g.reduce_sqrt_powers();
        if g.zero {
            return Expr::Const(Rational::zero());
        }

        let mut sums: Vec<Expr> = Vec::new();
        let mut atoms: Vec<Expr> = Vec::new();
        let mut regroup: Vec<Expr> = Vec::new();
        for (base, e) in std::mem::take(&mut g.powers) {
            if e == 0 {
                continue;
            }
            if matches!(base, Expr::Add(_)) && e > 0 {
                if e == 1 {
                    sums.push(base);
                } else {
                    match self.power_of_sum(&base, e) {
                        Some(expanded @ Expr::Add(_)) => sums.push(expanded),
                        Some(other) => regroup.push(other),
                        None => atoms.push(raw_pow(base, e)),
                    }
                }
            } else {
                atoms.push(raw_pow(base, e));
            }
        }
        if !regroup.is_empty() {
            let mut all = vec![Expr::Const(g.coef)];
            all.extend(atoms);
            all.extend(sums);
            all.extend(regroup);
            return self.mul(all);
        }

        if !sums.is_empty() {
            let degree: u32 = sums.iter().map(degree).sum();
            let count = sums.iter().fold(1usize, |acc, s| {
                acc.saturating_mul(match s {
                    Expr::Add(xs) => xs.len(),
                    _ => 1,
                })
            });
            if sums.len() == 1 || (degree <= self.expand_degree && count <= MAX_EXPANDED_TERMS) {
                let mut rest = atoms;
                if !g.coef.is_one() {
                    rest.push(Expr::Const(g.coef));
                }
                return self.distribute(sums, rest);
            }
            atoms.extend(sums);
        }
        finish_product(g.coef, atoms)
    }

    /// Canonical integer power of a canonical base.
    pub fn pow(&self, base: Expr, n: i64) -> Expr {
        match n {
            0 => Expr::int(1),
            1 => base,
            _ => self.mul(vec![raw_pow(base, n)]),
        }
    }

    /// Canonical function application, folding the exactly known values.
    pub fn func(&self, kind: FuncKind, arg: Expr) -> Expr {
        if let Expr::Const(c) = &arg {
            let folded = match kind {
                FuncKind::Sqrt => exact_sqrt(c),
                FuncKind::Ln if c.is_one() => Some(Rational::zero()),
                FuncKind::Exp | FuncKind::Cos if c.is_zero() => Some(Rational::one()),
                FuncKind::Sin | FuncKind::Arctan if c.is_zero() => Some(Rational::zero()),
                _ => None,
            };
            if let Some(v) = folded {
                return Expr::Const(v);
            }
        }
        Expr::Func(kind, Box::new(arg))
    }

    fn power_of_sum(&self, sum: &Expr, e: i64) -> Option<Expr> {
        let Expr::Add(xs) = sum else { return None };
        let deg = degree(sum) as i64;
        if e <= 0 || e.saturating_mul(deg) > self.expand_degree as i64 {
            return None;
        }
        let count = (xs.len() as f64).powi(e as i32);
        if count > MAX_EXPANDED_TERMS as f64 {
            return None;
        }
        Some(self.distribute(vec![sum.clone(); e as usize], vec![]))
    }

    /// Multiplies out `rest * sums[0] * sums[1] * ...` term by term.
    fn distribute(&self, sums: Vec<Expr>, rest: Vec<Expr>) -> Expr {
        let mut partials: Vec<Vec<Expr>> = vec![rest];
        for s in &sums {
            let terms: Vec<Expr> = match s {
                Expr::Add(xs) => xs.clone(),
                other => vec![other.clone()],
            };
            let mut next = Vec::with_capacity(partials.len() * terms.len());
            for p in &partials {
                for t in &terms {
                    let mut q = p.clone();
                    q.push(t.clone());
                    next.push(q);
                }
            }
            partials = next;
        }
        let products = partials.into_iter().map(|p| self.mul(p)).collect();
        self.add(products)
    }
}

struct Grouping {
    coef: Rational,
    zero: bool,
    powers: BTreeMap<Expr, i64>,
}

impl Grouping {
    fn new() -> Self {
        Grouping {
            coef: Rational::one(),
            zero: false,
            powers: BTreeMap::new(),
        }
    }

    fn absorb(&mut self, e: Expr, exp: i64) {
        match e {
            Expr::Const(c) => {
                if c.is_zero() {
                    if exp > 0 {
                        self.zero = true;
                    } else {
                        *self.powers.entry(Expr::Const(c)).or_insert(0) += exp;
                    }
                } else {
                    self.coef *= rational_pow(&c, exp);
                }
            }
            Expr::Mul(xs) => {
                for x in xs {
                    self.absorb(x, exp);
                }
            }
            Expr::Pow(b, m) => self.absorb(*b, m * exp),
            other => *self.powers.entry(other).or_insert(0) += exp,
        }
    }

    /// `sqrt(a)^(2k) -> a^k` and `sqrt(a)^(2k±1) -> a^k * sqrt(a)^(±1)`.
    fn reduce_sqrt_powers(&mut self) {
        loop {
            let pending: Vec<(Expr, i64)> = self
                .powers
                .iter()
                .filter(|(b, e)| matches!(b, Expr::Func(FuncKind::Sqrt, _)) && e.abs() >= 2)
                .map(|(b, e)| (b.clone(), *e))
                .collect();
            if pending.is_empty() {
                break;
            }
            for (base, e) in pending {
                self.powers.remove(&base);
                let Expr::Func(_, arg) = &base else { unreachable!() };
                let arg = (**arg).clone();
                if e % 2 == 0 {
                    self.absorb(arg, e / 2);
                } else {
                    let s = e.signum();
                    *self.powers.entry(base.clone()).or_insert(0) += s;
                    self.absorb(arg, (e - s) / 2);
                }
            }
        }
        self.powers.retain(|_, e| *e != 0);
    }
}

fn rational_pow(c: &Rational, exp: i64) -> Rational {
    if exp >= 0 {
        num_traits::pow(c.clone(), exp as usize)
    } else {
        num_traits::pow(c.recip(), (-exp) as usize)
    }
}

fn raw_pow(base: Expr, e: i64) -> Expr {
    if e == 1 {
        base
    } else {
        Expr::Pow(Box::new(base), e)
    }
}

fn finish_product(coef: Rational, mut atoms: Vec<Expr>) -> Expr {
    atoms.sort_by(factor_order);
    if coef.is_one() {
        return match atoms.len() {
            0 => Expr::int(1),
            1 => atoms.pop().unwrap(),
            _ => Expr::Mul(atoms),
        };
    }
    if atoms.is_empty() {
        return Expr::Const(coef);
    }
    let mut xs = Vec::with_capacity(atoms.len() + 1);
    xs.push(Expr::Const(coef));
    xs.extend(atoms);
    Expr::Mul(xs)
}

/// Splits a canonical non-constant term into its rational coefficient and monomial.
fn split_coefficient(t: Expr) -> (Rational, Expr) {
    match t {
        Expr::Mul(mut xs) if matches!(xs.first(), Some(Expr::Const(_))) => {
            let Expr::Const(c) = xs.remove(0) else { unreachable!() };
            let m = if xs.len() == 1 {
                xs.pop().unwrap()
            } else {
                Expr::Mul(xs)
            };
            (c, m)
        }
        other => (Rational::one(), other),
    }
}

fn with_coefficient(c: Rational, m: Expr) -> Expr {
    if c.is_one() {
        return m;
    }
    match m {
        Expr::Mul(xs) => {
            let mut ys = Vec::with_capacity(xs.len() + 1);
            ys.push(Expr::Const(c));
            ys.extend(xs);
            Expr::Mul(ys)
        }
        other => Expr::Mul(vec![Expr::Const(c), other]),
    }
}

fn factor_parts(f: &Expr) -> (&Expr, i64) {
    match f {
        Expr::Pow(b, n) => (b, *n),
        other => (other, 1),
    }
}

fn factor_order(a: &Expr, b: &Expr) -> Ordering {
    let (ba, ea) = factor_parts(a);
    let (bb, eb) = factor_parts(b);
    ba.cmp(bb).then(ea.cmp(&eb))
}

/// Exponents of x, y, u, v in a monomial (other factors ignored) and their sum.
fn signature(m: &Expr) -> (i64, [i64; 4]) {
    let mut exps = [0i64; 4];
    let factors: Vec<&Expr> = match m {
        Expr::Mul(xs) => xs.iter().collect(),
        other => vec![other],
    };
    for f in factors {
        if let (Expr::Var(v), e) = factor_parts(f) {
            exps[v.index()] += e;
        }
    }
    (exps.iter().sum(), exps)
}

fn term_order(a: &Expr, b: &Expr) -> Ordering {
    let (_, ma) = split_coefficient(a.clone());
    let (_, mb) = split_coefficient(b.clone());
    let (da, ea) = signature(&ma);
    let (db, eb) = signature(&mb);
    db.cmp(&da).then_with(|| eb.cmp(&ea)).then_with(|| ma.cmp(&mb))
}

/// Polynomial degree used for expansion decisions; opaque atoms count as 1,
/// negative powers as 0.
pub(crate) fn degree(e: &Expr) -> u32 {
    match e {
        Expr::Const(_) => 0,
        Expr::Var(_) | Expr::Func(..) => 1,
        Expr::Add(xs) => xs.iter().map(degree).max().unwrap_or(0),
        Expr::Mul(xs) => xs.iter().map(degree).sum(),
        Expr::Pow(b, n) if *n > 0 => degree(b).saturating_mul(*n as u32),
        Expr::Pow(..) => 0,
        Expr::Neg(a) => degree(a),
        Expr::Div(a, _) => degree(a),
    }
}

pub(crate) fn exact_sqrt(c: &Rational) -> Option<Rational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().to_biguint()?;
    let d = c.denom().to_biguint()?;
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &rn * &rn == n && &rd * &rd == d {
        Some(Rational::new(BigInt::from(rn), BigInt::from(rd)))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{format, parse};

    fn s(text: &str) -> Expr {
        simplify(&parse(text).unwrap())
    }

    #[test]
    fn derivative_shape_prints_as_sum() {
        assert_eq!(format(&s("2*x+2*y")), "2*x + 2*y");
        assert_eq!(format(&s("2*y + x*2")), "2*x + 2*y");
    }

    #[test]
    fn cancels_and_drops_units() {
        assert_eq!(simplify(&(Expr::x() + -Expr::x())), Expr::int(0));
        assert_eq!(simplify(&(Expr::int(1) * Expr::y())), Expr::y());
        assert_eq!(s("--x"), Expr::x());
        assert_eq!(s("x^0"), Expr::int(1));
        assert_eq!(s("x^1"), Expr::x());
        assert_eq!(s("0*sqrt(x)"), Expr::int(0));
    }

    #[test]
    fn folds_constants_and_exact_function_values() {
        assert_eq!(s("4/3"), Expr::rat(Rational::new(4.into(), 3.into())));
        assert_eq!(s("sqrt(9/4)"), Expr::rat(Rational::new(3.into(), 2.into())));
        assert_eq!(s("ln(1) + exp(0) + sin(0) + cos(0) + arctan(0)"), Expr::int(2));
        assert_eq!(format(&s("sqrt(2)")), "sqrt(2)");
    }

    #[test]
    fn combines_like_monomials() {
        assert_eq!(format(&s("x*y + 2*y*x - 3*x*y")), "0");
        assert_eq!(format(&s("x*x*y + y*x^2")), "2*x^2*y");
        assert_eq!(format(&s("x/x")), "1");
    }

    #[test]
    fn expands_within_degree_bound() {
        assert_eq!(format(&s("(x-1)^2")), "x^2 - 2*x + 1");
        assert_eq!(format(&s("(x-1)*(y-1)")), "x*y - x - y + 1");
        assert_eq!(format(&s("3*(x-1) + 4*(y-1)")), "3*x + 4*y - 7");
        // degree 7 stays factored
        let big = s("(x+1)^7");
        assert!(matches!(big, Expr::Pow(_, 7)));
        assert_eq!(simplify(&big), big);
    }

    #[test]
    fn first_order_task_numerator() {
        let e = s("x^2*y+x+y+3*(x-1)+4*(y-1)-3");
        assert_eq!(format(&e), "x^2*y + 4*x + 5*y - 10");
    }

    #[test]
    fn sqrt_squares_reduce() {
        assert_eq!(format(&s("sqrt(x)*sqrt(x)")), "x");
        assert_eq!(s("sqrt(x^2+1)^3"), s("(x^2+1)*sqrt(x^2+1)"));
    }

    #[test]
    fn idempotent_on_samples() {
        for text in [
            "x^2+2*x*y-3*y^2",
            "sqrt(x^2+y^2+1)-1",
            "(x+y)^3/(x-y)",
            "exp(x*y)*sin(x)/(1+x^2)",
            "-(x - y)*(x + y)^8",
            "1/(1/(x^2+y^2))",
        ] {
            let once = s(text);
            assert_eq!(simplify(&once), once, "{text}");
        }
    }
}
