//! Infix printer.
//!
//! Raw trees produced by the parser print back to text that parses to the same
//! tree. Canonical products with negative powers or fractional coefficients
//! print as fractions (`x/y`, `4*x/3`), which re-parse to an equal tree after
//! simplification.

use num_traits::{One, Signed, Zero};

use super::{Expr, Rational};

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

/// Deterministic human-readable infix form.
pub fn format(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, PREC_ADD, &mut out);
    out
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) => {
            if c.is_negative() {
                PREC_NEG
            } else if !c.denom().is_one() {
                PREC_MUL
            } else {
                PREC_ATOM
            }
        }
        Expr::Var(_) | Expr::Func(..) => PREC_ATOM,
        Expr::Add(_) => PREC_ADD,
        Expr::Mul(xs) => {
            if matches!(xs.first(), Some(Expr::Const(c)) if c.is_negative()) {
                PREC_NEG
            } else {
                PREC_MUL
            }
        }
        Expr::Div(..) => PREC_MUL,
        Expr::Neg(_) => PREC_NEG,
        Expr::Pow(_, n) if *n < 0 => PREC_MUL,
        Expr::Pow(..) => PREC_POW,
    }
}

fn write_expr(e: &Expr, min_prec: u8, out: &mut String) {
    if precedence(e) < min_prec {
        out.push('(');
        write_bare(e, out);
        out.push(')');
    } else {
        write_bare(e, out);
    }
}

fn write_bare(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(c) => write_rational(c, out),
        Expr::Var(v) => out.push_str(v.name()),
        Expr::Func(k, a) => {
            out.push_str(k.name());
            out.push('(');
            write_expr(a, PREC_ADD, out);
            out.push(')');
        }
        Expr::Add(xs) => write_sum(xs, out),
        Expr::Mul(xs) => write_product(xs, out),
        Expr::Div(a, b) => {
            write_expr(a, PREC_MUL, out);
            out.push('/');
            write_expr(b, PREC_NEG, out);
        }
        Expr::Neg(a) => {
            out.push('-');
            write_expr(a, PREC_NEG, out);
        }
        Expr::Pow(b, n) if *n < 0 => {
            out.push_str("1/");
            write_power(b, -n, out);
        }
        Expr::Pow(b, n) => write_power(b, *n, out),
    }
}

fn write_rational(c: &Rational, out: &mut String) {
    if c.denom().is_one() {
        out.push_str(&c.numer().to_string());
    } else {
        out.push_str(&format!("{}/{}", c.numer(), c.denom()));
    }
}

fn write_power(base: &Expr, n: i64, out: &mut String) {
    if n == 1 {
        write_expr(base, PREC_POW, out);
        return;
    }
    // a power's base must be an atom; nested powers need parentheses too
    let needs_parens = !matches!(precedence(base), PREC_ATOM);
    if needs_parens {
        out.push('(');
        write_bare(base, out);
        out.push(')');
    } else {
        write_bare(base, out);
    }
    out.push('^');
    out.push_str(&n.to_string());
}

/// The negation of `t` when `t` prints with a leading minus sign.
fn negated_term(t: &Expr) -> Option<Expr> {
    match t {
        Expr::Neg(a) => Some((**a).clone()),
        Expr::Const(c) if c.is_negative() => Some(Expr::Const(-c)),
        Expr::Mul(xs) => match xs.first() {
            Some(Expr::Const(c)) if c.is_negative() => {
                let c = -c;
                let mut rest: Vec<Expr> = xs[1..].to_vec();
                if c.is_one() && !rest.is_empty() {
                    Some(if rest.len() == 1 {
                        rest.pop().unwrap()
                    } else {
                        Expr::Mul(rest)
                    })
                } else {
                    let mut ys = vec![Expr::Const(c)];
                    ys.append(&mut rest);
                    Some(Expr::Mul(ys))
                }
            }
            _ => None,
        },
        _ => None,
    }
}

fn write_sum(xs: &[Expr], out: &mut String) {
    for (i, t) in xs.iter().enumerate() {
        if i == 0 {
            // a nested sum in first position keeps its parentheses
            write_expr(t, PREC_MUL.min(precedence_floor(t)), out);
            continue;
        }
        match negated_term(t) {
            Some(pos) => {
                out.push_str(" - ");
                write_expr(&pos, PREC_MUL, out);
            }
            None => {
                out.push_str(" + ");
                write_expr(t, PREC_MUL, out);
            }
        }
    }
}

fn precedence_floor(t: &Expr) -> u8 {
    if matches!(t, Expr::Add(_)) {
        PREC_MUL
    } else {
        PREC_ADD
    }
}

fn is_fraction_style(xs: &[Expr]) -> bool {
    xs.iter().any(|f| match f {
        Expr::Pow(_, n) => *n < 0,
        _ => false,
    }) || matches!(xs.first(), Some(Expr::Const(c)) if !c.denom().is_one())
}

fn write_product(xs: &[Expr], out: &mut String) {
    if !is_fraction_style(xs) {
        let mut sign_only = false;
        for (i, f) in xs.iter().enumerate() {
            if i == 0 {
                if matches!(f, Expr::Const(c) if *c == -Rational::one()) && xs.len() > 1 {
                    out.push('-');
                    sign_only = true;
                    continue;
                }
                write_expr(f, PREC_NEG, out);
            } else {
                if !std::mem::take(&mut sign_only) {
                    out.push('*');
                }
                let min = match f {
                    Expr::Mul(_) | Expr::Div(..) => PREC_ATOM,
                    _ => PREC_NEG,
                };
                write_expr(f, min, out);
            }
        }
        return;
    }

    let (coef, factors) = match xs.first() {
        Some(Expr::Const(c)) => (c.clone(), &xs[1..]),
        _ => (Rational::one(), xs),
    };
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    let num_coef = coef.numer().abs();
    let den_coef = coef.denom().clone();
    if !num_coef.is_one() {
        num.push(num_coef.to_string());
    }
    if !den_coef.is_one() {
        den.push(den_coef.to_string());
    }
    for f in factors {
        let mut s = String::new();
        match f {
            Expr::Pow(b, n) if *n < 0 => {
                write_power(b, -n, &mut s);
                den.push(s);
            }
            other => {
                write_expr(other, PREC_POW, &mut s);
                num.push(s);
            }
        }
    }
    if coef.is_negative() {
        out.push('-');
    }
    if num.is_empty() {
        out.push('1');
    } else {
        out.push_str(&num.join("*"));
    }
    if !den.is_empty() {
        out.push('/');
        if den.len() == 1 {
            out.push_str(&den[0]);
        } else {
            out.push('(');
            out.push_str(&den.join("*"));
            out.push(')');
        }
    }
    debug_assert!(!coef.is_zero());
}
