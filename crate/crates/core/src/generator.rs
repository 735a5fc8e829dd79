//! Synthesis of first- and second-order indeterminate forms with a prescribed
//! limit.
//!
//! Starting from seeds `f`, `g`, a point and a target `k`, the generator adds
//! the linear (or quadratic) correction to `Δf` that makes the numerator's
//! leading tensor exactly `k` times the denominator's, then checks the result
//! with the engine before returning it.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::calculus::{classify_order, derivative_tensor, CalculusError, DerivativeTensor, LimitPoint};
use crate::expr::{eval, format, simplify, Env, EvalResult, Expr, Rational};
use crate::lhopital::{decide, EngineConfig, EngineError, LimitVerdict, SoundnessFlag};
use crate::scalar::{format_rational, RationalJson, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("problems can only be generated at a finite point, got {0}")]
    InfinitePoint(Box<LimitPoint>),
    #[error("{what} is not exact at the point ({value}); seeds must have rational values and derivatives there")]
    NotExact { what: String, value: String },
    #[error("{0} is undefined at the point")]
    Undefined(String),
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("mixed partials of {0} differ (Schwarz check failed)")]
    Schwarz(&'static str),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    /// The engine disagreed with the construction; the problem is not emitted.
    #[error("internal consistency error: {0}")]
    RoundTrip(String),
}

impl From<EngineError> for GeneratorError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Calculus(c) => GeneratorError::Calculus(c),
            EngineError::Unsupported(why) => GeneratorError::RoundTrip(why),
        }
    }
}

/// Correction constants added to the seed numerator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constants {
    /// `C1·(x−x0) + C2·(y−y0)`.
    First { c1: Rational, c2: Rational },
    /// `C1*·(x−x0)² + C2*·(x−x0)(y−y0) + C3*·(y−y0)²`.
    Second { c1: Rational, c2: Rational, c3: Rational },
}

impl Constants {
    /// `(name, value)` pairs in display order.
    pub fn named(&self) -> Vec<(&'static str, &Rational)> {
        match self {
            Constants::First { c1, c2 } => vec![("C1", c1), ("C2", c2)],
            Constants::Second { c1, c2, c3 } => vec![("C1*", c1), ("C2*", c2), ("C3*", c3)],
        }
    }
}

impl Serialize for Constants {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let named = self.named();
        let mut m = s.serialize_map(Some(named.len()))?;
        for (k, v) in named {
            m.serialize_entry(k, &RationalJson(v))?;
        }
        m.end()
    }
}

impl fmt::Display for Constants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .named()
            .into_iter()
            .map(|(k, v)| format!("{k} = {}", format_rational(v)))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratedProblem {
    pub numerator: Expr,
    pub denominator: Expr,
    pub point: LimitPoint,
    #[serde(serialize_with = "crate::scalar::serialize_rational")]
    pub target: Rational,
    pub order: u32,
    pub constants: Constants,
    /// The polynomial added to `Δf` (or `Δf − df`).
    pub correction: Expr,
    pub seed_f: Expr,
    pub seed_g: Expr,
    pub flags: BTreeSet<SoundnessFlag>,
    /// The engine's verdict on the emitted problem.
    pub verdict: LimitVerdict,
}

impl GeneratedProblem {
    /// The task as it would be offered to a student.
    pub fn statement(&self) -> String {
        format!(
            "compute lim_{{(x,y)->{}}} ({}) / ({}) = ?",
            self.point,
            format(&self.numerator),
            format(&self.denominator)
        )
    }
}

fn exact(what: &str, s: &Scalar) -> Result<Rational, GeneratorError> {
    s.as_exact().cloned().ok_or_else(|| GeneratorError::NotExact {
        what: what.to_string(),
        value: s.to_string(),
    })
}

fn value(what: &str, e: &Expr, x0: &Rational, y0: &Rational) -> Result<Rational, GeneratorError> {
    match eval(e, &Env::xy(x0.clone(), y0.clone())) {
        Ok(EvalResult::Exact(r)) => Ok(r),
        Ok(EvalResult::Approx(v)) => Err(GeneratorError::NotExact {
            what: what.to_string(),
            value: v.to_string(),
        }),
        Ok(_) | Err(_) => Err(GeneratorError::Undefined(what.to_string())),
    }
}

fn tensor(what: &str, e: &Expr, p: &LimitPoint, n: u32) -> Result<Vec<Rational>, GeneratorError> {
    let t: DerivativeTensor = derivative_tensor(e, p, n)?;
    t.entries
        .iter()
        .enumerate()
        .map(|(i, s)| exact(&format!("{what} entry {i}"), s))
        .collect()
}

fn c(r: &Rational) -> Expr {
    Expr::Const(r.clone())
}

fn finite(p: &LimitPoint) -> Result<(Rational, Rational), GeneratorError> {
    p.finite_coords()
        .ok_or_else(|| GeneratorError::InfinitePoint(Box::new(p.clone())))
}

/// Builds a first-order problem `(Δf + C1·(x−x0) + C2·(y−y0)) / Δg` with limit `k`.
pub fn construct_order1(f: &Expr, g: &Expr, p: &LimitPoint, k: &Rational) -> Result<GeneratedProblem, GeneratorError> {
    let (x0, y0) = finite(p)?;
    let g1 = tensor("g'", g, p, 1)?;
    for (name, v) in [("g'_x", &g1[0]), ("g'_y", &g1[1])] {
        if v.is_zero() {
            return Err(GeneratorError::Hypothesis(format!(
                "{name} vanishes at {p}; both first partials of g must be nonzero"
            )));
        }
    }
    let f1 = tensor("f'", f, p, 1)?;
    let c1 = k * &g1[0] - &f1[0];
    let c2 = k * &g1[1] - &f1[1];

    let fp = value("f", f, &x0, &y0)?;
    let gp = value("g", g, &x0, &y0)?;
    let dx = Expr::x() - c(&x0);
    let dy = Expr::y() - c(&y0);
    let correction = simplify(&(c(&c1) * dx + c(&c2) * dy));
    let numerator = simplify(&(f.clone() - c(&fp) + correction.clone()));
    let denominator = simplify(&(g.clone() - c(&gp)));
    finish(
        f,
        g,
        p,
        k,
        1,
        Constants::First { c1, c2 },
        correction,
        numerator,
        denominator,
    )
}

/// Builds a second-order problem `(Δf − df + C1*·(x−x0)² + C2*·(x−x0)(y−y0) + C3*·(y−y0)²) / (Δg − dg)`
/// with limit `k`.
pub fn construct_order2(f: &Expr, g: &Expr, p: &LimitPoint, k: &Rational) -> Result<GeneratedProblem, GeneratorError> {
    let (x0, y0) = finite(p)?;
    let tg = derivative_tensor(g, p, 2)?;
    if !tg.mixed_symmetric {
        return Err(GeneratorError::Schwarz("g"));
    }
    let tf = derivative_tensor(f, p, 2)?;
    if !tf.mixed_symmetric {
        return Err(GeneratorError::Schwarz("f"));
    }
    let g2: Vec<Rational> = tg.entries.iter().map(|s| exact("g''", s)).collect::<Result<_, _>>()?;
    let f2: Vec<Rational> = tf.entries.iter().map(|s| exact("f''", s)).collect::<Result<_, _>>()?;
    if g2.iter().all(Zero::is_zero) {
        return Err(GeneratorError::Hypothesis(format!(
            "every second partial of g vanishes at {p}; Δg − dg must be of exactly second order"
        )));
    }
    let g1 = tensor("g'", g, p, 1)?;
    let f1 = tensor("f'", f, p, 1)?;
    let two = Rational::from_integer(2.into());
    let c1 = (k * &g2[0] - &f2[0]) / &two;
    let c2 = k * &g2[1] - &f2[1];
    let c3 = (k * &g2[2] - &f2[2]) / &two;

    let fp = value("f", f, &x0, &y0)?;
    let gp = value("g", g, &x0, &y0)?;
    let dx = || Expr::x() - c(&x0);
    let dy = || Expr::y() - c(&y0);
    let linear = |t: &[Rational]| c(&t[0]) * dx() + c(&t[1]) * dy();
    let correction = simplify(&(c(&c1) * dx().pow(2) + c(&c2) * (dx() * dy()) + c(&c3) * dy().pow(2)));
    let numerator = simplify(&(f.clone() - c(&fp) - linear(&f1) + correction.clone()));
    let denominator = simplify(&(g.clone() - c(&gp) - linear(&g1)));

    for (name, e) in [("numerator", &numerator), ("denominator", &denominator)] {
        let t = derivative_tensor(e, p, 1)?;
        if t.is_nonzero() {
            return Err(GeneratorError::RoundTrip(format!(
                "{name} has a nonzero first-order tensor"
            )));
        }
    }
    finish(
        f,
        g,
        p,
        k,
        2,
        Constants::Second { c1, c2, c3 },
        correction,
        numerator,
        denominator,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    f: &Expr,
    g: &Expr,
    p: &LimitPoint,
    k: &Rational,
    order: u32,
    constants: Constants,
    correction: Expr,
    numerator: Expr,
    denominator: Expr,
) -> Result<GeneratedProblem, GeneratorError> {
    let config = EngineConfig::default();
    let verdict = decide(&numerator, &denominator, p, &config)?;
    match verdict.result.exists_value() {
        Some(Scalar::Exact(v)) if v == k => {}
        _ => {
            return Err(GeneratorError::RoundTrip(format!(
                "engine returned {} for target {}",
                verdict.result,
                format_rational(k)
            )))
        }
    }
    let den_order = classify_order(&denominator, p, config.max_order)?.order();
    if den_order != Some(order) {
        return Err(GeneratorError::RoundTrip(format!(
            "denominator has order {den_order:?}, expected {order}"
        )));
    }
    let mut flags = verdict.soundness_flags.clone();
    if k.is_zero() {
        // a zero target gives a numerator of higher order than the denominator
        flags.insert(SoundnessFlag::BeyondPaper);
    } else {
        let num_order = classify_order(&numerator, p, config.max_order)?.order();
        if num_order != Some(order) {
            return Err(GeneratorError::RoundTrip(format!(
                "numerator has order {num_order:?}, expected {order}"
            )));
        }
    }
    Ok(GeneratedProblem {
        numerator,
        denominator,
        point: p.clone(),
        target: k.clone(),
        order,
        constants,
        correction,
        seed_f: f.clone(),
        seed_g: g.clone(),
        flags,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn first_order_example() {
        let g = construct_order1(&e("x^2*y+x+y"), &e("x^2*y^2+x*y"), &LimitPoint::ints(1, 1), &q(2)).unwrap();
        assert_eq!(g.constants, Constants::First { c1: q(3), c2: q(4) });
        assert_eq!(g.numerator, simplify(&e("x^2*y+4*x+5*y-10")));
        assert_eq!(g.denominator, simplify(&e("x^2*y^2+x*y-2")));
    }

    #[test]
    fn second_order_example() {
        let g = construct_order2(&e("x^2*y+x+y"), &e("x^2*y^2+x*y"), &LimitPoint::ints(1, 1), &q(2)).unwrap();
        assert_eq!(
            g.constants,
            Constants::Second {
                c1: q(1),
                c2: q(8),
                c3: q(2)
            }
        );
        assert_eq!(g.numerator, simplify(&e("x^2*y+x^2+8*x*y-12*x+2*y^2-13*y+13")));
        assert_eq!(g.denominator, simplify(&e("x^2*y^2+x*y-3*x-3*y+4")));
        assert!(g.flags.contains(&SoundnessFlag::DegenerateDirection));
    }

    #[test]
    fn identity_seeds() {
        let p = LimitPoint::ints(1, 2);
        let g1 = construct_order1(&e("x*y+x^2"), &e("x*y+x^2"), &p, &q(1)).unwrap();
        assert_eq!(g1.constants, Constants::First { c1: q(0), c2: q(0) });
        assert_eq!(g1.numerator, g1.denominator);
        let g2 = construct_order2(&e("x^2*y+y^3"), &e("x^2*y+y^3"), &p, &q(1)).unwrap();
        assert_eq!(
            g2.constants,
            Constants::Second {
                c1: q(0),
                c2: q(0),
                c3: q(0)
            }
        );
        assert_eq!(g2.numerator, g2.denominator);
    }

    #[test]
    fn forced_constants() {
        let g = construct_order1(&e("0"), &e("x+y"), &LimitPoint::origin(), &q(5)).unwrap();
        assert_eq!(g.numerator, simplify(&e("5*x+5*y")));
        assert_eq!(g.denominator, simplify(&e("x+y")));
        let g = construct_order2(&e("0"), &e("x^2+y^2"), &LimitPoint::origin(), &q(3)).unwrap();
        assert_eq!(
            g.constants,
            Constants::Second {
                c1: q(3),
                c2: q(0),
                c3: q(3)
            }
        );
        assert_eq!(g.numerator, simplify(&e("3*x^2+3*y^2")));
    }

    #[test]
    fn zero_target_is_flagged() {
        let g = construct_order1(&e("x*y"), &e("x+2*y"), &LimitPoint::ints(1, 1), &q(0)).unwrap();
        assert!(g.flags.contains(&SoundnessFlag::BeyondPaper));
    }

    #[test]
    fn hypotheses_are_named() {
        let err = construct_order1(&e("x"), &e("x^2+y"), &LimitPoint::origin(), &q(1)).unwrap_err();
        assert!(err.to_string().contains("g'_x"), "{err}");
        let err = construct_order2(&e("x"), &e("x+y"), &LimitPoint::origin(), &q(1)).unwrap_err();
        assert!(matches!(err, GeneratorError::Hypothesis(_)));
        let err = construct_order1(&e("x"), &e("x+y"), &LimitPoint::infinity(), &q(1)).unwrap_err();
        assert!(matches!(err, GeneratorError::InfinitePoint(_)));
        let err = construct_order1(&e("x"), &e("sqrt(2)*x+y"), &LimitPoint::origin(), &q(1)).unwrap_err();
        assert!(matches!(err, GeneratorError::NotExact { .. }));
    }
}
