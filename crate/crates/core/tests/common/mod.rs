//! Shared fixtures: the expression corpus, an independent `f64` evaluator with
//! central differences, curated limit problems, and deterministic runners.

#![allow(dead_code)]

pub mod checks;

use hopital2d::{Expr, FuncKind, LimitPoint, Rational, Var};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Expressions in `x, y`, all smooth on the box `[1/4, 3]²`.
pub const CORPUS: &[&str] = &[
    "x",
    "y",
    "x+y",
    "x*y",
    "x^2+y^2",
    "x^2+2*x*y-3*y^2",
    "x^3-y^3",
    "x^2+x*y+y^2",
    "x^2-x*y+y^2",
    "x^2*y+x+y",
    "x^2*y^2+x*y",
    "(x+y)^3",
    "(x-y)^2*(x+2*y)",
    "x^4+y^2",
    "x^2+y^4",
    "2*x^2+2*y^2+x+y",
    "3*x^2+3*y^2",
    "x^2*y",
    "1/(x+y)",
    "x/(1+y^2)",
    "(x^2-y)/(x+y+1)",
    "sqrt(x^2+y^2+1)",
    "sqrt(x^2+y^2+1)-1",
    "sqrt(x*y)",
    "exp(x*y)",
    "exp(x-y)",
    "ln(x+y)",
    "ln(1+x^2+y^2)",
    "sin(x+y)",
    "sin(x)*cos(y)",
    "cos(x*y)",
    "arctan(y/x)",
    "arctan(x*y)",
    "x*exp(y)",
    "y*ln(x)",
    "sin(x^2)-x^2",
    "exp(x)-1-x",
    "1-cos(x*y)",
    "sqrt(1+x)-1",
    "x^3*y-x*y^3",
    "(x^2+y^2)^2",
    "x^5-3*x^2*y^3+y",
    "-x^2+y/3",
    "5/2*x*y^2-1/3",
    "(x+1)^4*(y-1)^2",
    "x/(x+y)",
    "(x*y)/(x^2+y^2)",
    "x^2*y/(x^2+y^2)",
    "sin(x)/(1+y^2)",
    "exp(-x^2-y^2)",
    "ln(x)*ln(y)",
    "sqrt(x)+sqrt(y)",
    "arctan(x)+arctan(y)",
    "cos(x)^2+sin(y)^2",
    "(x-1)^2+(y-1)^3",
    "x^2*y^2-2",
    "x^2*y+x^2+8*x*y-12*x+2*y^2-13*y+13",
    "x^2*y^2+x*y-3*x-3*y+4",
    "exp(sin(x*y))",
    "sqrt(x^2+y^2)",
];

pub fn corpus() -> Vec<Expr> {
    CORPUS
        .iter()
        .map(|s| hopital2d::parse(s).unwrap_or_else(|e| panic!("corpus entry {s}: {e}")))
        .collect()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    rat(n, 1)
}

/// Plain `f64` evaluation straight from the tree, sharing no code with the
/// crate's evaluator.
pub fn f64_eval(e: &Expr, x: f64, y: f64) -> f64 {
    match e {
        Expr::Const(c) => c.to_f64().expect("constant fits f64"),
        Expr::Var(Var::X) => x,
        Expr::Var(Var::Y) => y,
        Expr::Var(v) => panic!("unexpected variable {v:?}"),
        Expr::Add(xs) => xs.iter().map(|c| f64_eval(c, x, y)).sum(),
        Expr::Mul(xs) => xs.iter().map(|c| f64_eval(c, x, y)).product(),
        Expr::Pow(b, n) => f64_eval(b, x, y).powi(*n as i32),
        Expr::Neg(a) => -f64_eval(a, x, y),
        Expr::Div(a, b) => f64_eval(a, x, y) / f64_eval(b, x, y),
        Expr::Func(k, a) => {
            let v = f64_eval(a, x, y);
            match k {
                FuncKind::Sqrt => v.sqrt(),
                FuncKind::Exp => v.exp(),
                FuncKind::Ln => v.ln(),
                FuncKind::Sin => v.sin(),
                FuncKind::Cos => v.cos(),
                FuncKind::Arctan => v.atan(),
            }
        }
    }
}

/// Central difference of `e` in `v` with step `h`.
pub fn central_diff(e: &Expr, v: Var, x: f64, y: f64, h: f64) -> f64 {
    let (a, b) = match v {
        Var::X => (f64_eval(e, x + h, y), f64_eval(e, x - h, y)),
        _ => (f64_eval(e, x, y + h), f64_eval(e, x, y - h)),
    };
    (a - b) / (2.0 * h)
}

/// Expected verdict of a curated problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    Exists(Rational),
    NotExists,
    InfiniteMagnitude,
}

pub struct Curated {
    pub num: &'static str,
    pub den: &'static str,
    pub point: &'static str,
    pub expected: Expected,
}

/// Limit problems with hand-checked verdicts.
pub fn curated() -> Vec<Curated> {
    use Expected::*;
    let c = |num, den, point, expected| Curated {
        num,
        den,
        point,
        expected,
    };
    vec![
        c("x^2+2*x*y-3*y^2", "x^3-y^3", "1,1", Exists(rat(4, 3))),
        c("x^2+x*y+y^2", "x^2-x*y+y^2", "0,0", NotExists),
        c(
            "x^2*y+x^2+8*x*y-12*x+2*y^2-13*y+13",
            "x^2*y^2+x*y-3*x-3*y+4",
            "1,1",
            Exists(int(2)),
        ),
        c("x^2+y^2", "sqrt(x^2+y^2+1)-1", "0,0", Exists(int(2))),
        c("x^2*y", "x^2+y^2", "0,0", Exists(int(0))),
        c("2*x^2+2*y^2+x+y", "3*x^2+3*y^2", "inf", Exists(rat(2, 3))),
        c("x", "x", "0,0", Exists(int(1))),
        c("x+y", "x-y+1", "2,2", Exists(int(4))),
        c("x+2*y", "3*x+y", "0,0", NotExists),
        c("exp(x*y)-1", "x*y", "0,0", Exists(int(1))),
        c("x^2-y^2", "x^2+y^2", "0,0", NotExists),
        c("x^3+y^3", "x^2+y^2", "0,0", Exists(int(0))),
        c("x^2+y^2", "x^4+y^4", "0,0", InfiniteMagnitude),
        c("x^4+y^2", "x^2+y^4", "inf", NotExists),
    ]
}

/// Problems where the first-order theorem reports a limit although the
/// denominator vanishes along a curve through the point on which the numerator
/// does not. The verdict names the engine's answer; the true limit does not exist.
pub fn soundness_gaps() -> Vec<Curated> {
    vec![
        Curated {
            num: "3*x-6*y",
            den: "x-2*y+x^2",
            point: "0,0",
            expected: Expected::Exists(int(3)),
        },
        // the generated first-order problem: the denominator vanishes on xy = 1
        Curated {
            num: "x^2*y+4*x+5*y-10",
            den: "x^2*y^2+x*y-2",
            point: "1,1",
            expected: Expected::Exists(int(2)),
        },
        Curated {
            num: "sin(x)+sin(y)",
            den: "x+y+x*y",
            point: "0,0",
            expected: Expected::Exists(int(1)),
        },
    ]
}

pub fn point(text: &str) -> LimitPoint {
    text.parse().expect("curated point parses")
}

/// A runner with a fixed seed and no failure persistence, so CI is deterministic.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}
