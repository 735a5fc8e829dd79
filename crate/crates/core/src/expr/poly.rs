//! Sparse polynomials over `x, y, u, v` and rational-function normalization.
//!
//! Used to clear denominators after a point at infinity has been moved to the
//! origin: every rational expression becomes a pair of polynomials with no
//! common monomial factor.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{simplify, Expr, Rational, Var};

type Exponents = [u32; 4];

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Poly {
    terms: BTreeMap<Exponents, Rational>,
}

impl Poly {
    fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert([0; 4], c);
        }
        p
    }

    fn one() -> Self {
        Poly::constant(Rational::one())
    }

    fn var(v: Var) -> Self {
        let mut e = [0; 4];
        e[v.index()] = 1;
        let mut p = Poly::zero();
        p.terms.insert(e, Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(*e).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Poly { terms }
    }

    fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                let entry = out.terms.entry(e).or_insert_with(Rational::zero);
                *entry += ca * cb;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// The single monomial of a one-term polynomial.
    fn as_monomial(&self) -> Option<(Exponents, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    fn monomial(e: Exponents) -> Poly {
        let mut p = Poly::zero();
        p.terms.insert(e, Rational::one());
        p
    }

    /// Elementwise minimum exponent over all terms.
    fn min_exponents(&self) -> Exponents {
        let mut it = self.terms.keys();
        let mut m = match it.next() {
            Some(e) => *e,
            None => return [0; 4],
        };
        for e in it {
            for i in 0..4 {
                m[i] = m[i].min(e[i]);
            }
        }
        m
    }

    fn divide_monomial(&self, m: Exponents) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([e[0] - m[0], e[1] - m[1], e[2] - m[2], e[3] - m[3]], c.clone()))
                .collect(),
        }
    }

    pub fn to_expr(&self) -> Expr {
        let mut terms = Vec::new();
        for (e, c) in &self.terms {
            let mut factors = vec![Expr::Const(c.clone())];
            for v in Var::ALL {
                let k = e[v.index()];
                if k > 0 {
                    factors.push(Expr::Var(v).pow(k as i64));
                }
            }
            terms.push(Expr::Mul(factors));
        }
        match terms.len() {
            0 => Expr::int(0),
            1 => simplify(&terms.pop().unwrap()),
            _ => simplify(&Expr::Add(terms)),
        }
    }
}

/// A quotient of polynomials; the denominator is never zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RatFun {
    pub num: Poly,
    pub den: Poly,
}

impl RatFun {
    fn new(num: Poly, den: Poly) -> Option<RatFun> {
        if den.is_zero() {
            return None;
        }
        Some(RatFun { num, den }.cancel_monomials())
    }

    fn poly(p: Poly) -> RatFun {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    /// Divides out the largest monomial dividing both numerator and denominator.
    fn cancel_monomials(self) -> RatFun {
        if self.num.is_zero() {
            return RatFun {
                num: self.num,
                den: Poly::one(),
            };
        }
        let a = self.num.min_exponents();
        let b = self.den.min_exponents();
        let m = [a[0].min(b[0]), a[1].min(b[1]), a[2].min(b[2]), a[3].min(b[3])];
        RatFun {
            num: self.num.divide_monomial(m),
            den: self.den.divide_monomial(m),
        }
    }

    fn sum(parts: Vec<RatFun>) -> Option<RatFun> {
        // with monomial denominators, use their least common multiple so the
        // result does not depend on term order
        if parts.iter().all(|p| p.den.as_monomial().is_some()) {
            let mut lcm = [0u32; 4];
            for p in &parts {
                let (e, _) = p.den.as_monomial().unwrap();
                for i in 0..4 {
                    lcm[i] = lcm[i].max(e[i]);
                }
            }
            let mut num = Poly::zero();
            for p in &parts {
                let (e, c) = p.den.as_monomial().unwrap();
                let quotient = [lcm[0] - e[0], lcm[1] - e[1], lcm[2] - e[2], lcm[3] - e[3]];
                let scale = Poly::constant(c.recip()).mul(&Poly::monomial(quotient));
                num = num.add(&p.num.mul(&scale));
            }
            return RatFun::new(num, Poly::monomial(lcm));
        }
        let mut acc = RatFun::poly(Poly::zero());
        for p in parts {
            acc = if acc.den == p.den {
                RatFun::new(acc.num.add(&p.num), p.den)?
            } else {
                RatFun::new(acc.num.mul(&p.den).add(&p.num.mul(&acc.den)), acc.den.mul(&p.den))?
            };
        }
        Some(acc)
    }

    fn product(&self, other: &RatFun) -> Option<RatFun> {
        RatFun::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn quotient(&self, other: &RatFun) -> Option<RatFun> {
        if self.den == other.den {
            RatFun::new(self.num.clone(), other.num.clone())
        } else {
            RatFun::new(self.num.mul(&other.den), self.den.mul(&other.num))
        }
    }

    fn powi(&self, n: i64) -> Option<RatFun> {
        let k = n.unsigned_abs() as u32;
        let (a, b) = (self.num.pow(k), self.den.pow(k));
        if n >= 0 {
            RatFun::new(a, b)
        } else {
            RatFun::new(b, a)
        }
    }
}

const MAX_CLEAR_POWER: i64 = 64;

/// Converts a function-free expression to a reduced polynomial quotient.
pub(crate) fn to_ratfun(e: &Expr) -> Option<RatFun> {
    match e {
        Expr::Const(c) => Some(RatFun::poly(Poly::constant(c.clone()))),
        Expr::Var(v) => Some(RatFun::poly(Poly::var(*v))),
        Expr::Add(xs) => RatFun::sum(xs.iter().map(to_ratfun).collect::<Option<Vec<_>>>()?),
        Expr::Mul(xs) => {
            let mut acc = RatFun::poly(Poly::one());
            for x in xs {
                acc = acc.product(&to_ratfun(x)?)?;
            }
            Some(acc)
        }
        Expr::Neg(a) => {
            let r = to_ratfun(a)?;
            Some(RatFun {
                num: r.num.neg(),
                den: r.den,
            })
        }
        Expr::Div(a, b) => to_ratfun(a)?.quotient(&to_ratfun(b)?),
        Expr::Pow(b, n) if n.abs() <= MAX_CLEAR_POWER => to_ratfun(b)?.powi(*n),
        Expr::Pow(..) | Expr::Func(..) => None,
    }
}

/// Writes a function-free expression as `numerator / denominator` with
/// polynomial parts sharing no monomial factor. Returns `None` when the
/// expression contains a function application.
pub fn clear_denominators(e: &Expr) -> Option<(Expr, Expr)> {
    let r = to_ratfun(e)?;
    Some((r.num.to_expr(), r.den.to_expr()))
}

/// `f/g` as one reduced polynomial quotient.
pub(crate) fn clear_quotient(f: &Expr, g: &Expr) -> Option<(Expr, Expr)> {
    let q = to_ratfun(f)?.quotient(&to_ratfun(g)?)?;
    Some((q.num.to_expr(), q.den.to_expr()))
}
