//! Property checks shared by the property tests and the acceptance suite.
//! Each returns `Err` with a description of the first counterexample.

use hopital2d::calculus::derivative_tensor;
use hopital2d::expr::{eval, Env};
use hopital2d::generator::GeneratorError;
use hopital2d::lhopital::{first_order_case, RatioDecision};
use hopital2d::{
    classify_order, construct_order1, construct_order2, decide, parse, partial, ratio_criterion, simplify, CaseLabel,
    EngineConfig, Expr, LimitPoint, LimitResult, Rational, Scalar, Var,
};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::{central_diff, corpus, curated, f64_eval, point, rat, runner, Expected, CORPUS};

/// Rationals `n/8` in `[1/4, 3]`.
fn box_coord() -> impl Strategy<Value = Rational> {
    (2i64..=24).prop_map(|n| rat(n, 8))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    ((1i64..=9), (1i64..=5), any::<bool>()).prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

fn to_f64(e: &Expr, x: &Rational, y: &Rational) -> Option<f64> {
    let v = eval(e, &Env::xy(x.clone(), y.clone())).ok()?.to_f64();
    v.is_finite().then_some(v)
}

/// Symbolic partials against central differences (`h = 1e-5`), relative
/// error at most `1e-6` with an absolute floor of 1 on the scale.
pub fn fd_agreement(cases: u32) -> Result<(), String> {
    let exprs = corpus();
    let partials: Vec<(Expr, Expr)> = exprs.iter().map(|e| (partial(e, Var::X), partial(e, Var::Y))).collect();
    runner(cases)
        .run(&(0..exprs.len(), box_coord(), box_coord()), |(i, x, y)| {
            let (xf, yf) = (x.to_f64_lossy(), y.to_f64_lossy());
            for (v, d) in [(Var::X, &partials[i].0), (Var::Y, &partials[i].1)] {
                let sym = to_f64(d, &x, &y).ok_or_else(|| fail(format!("{} undefined", CORPUS[i])))?;
                let fd = central_diff(&exprs[i], v, xf, yf, 1e-5);
                let err = (sym - fd).abs() / sym.abs().max(1.0);
                if err > 1e-6 {
                    return Err(fail(format!(
                        "d/d{v:?} of {} at ({xf}, {yf}): symbolic {sym}, difference {fd}",
                        CORPUS[i]
                    )));
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

trait Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl Lossy for Rational {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

fn monomial(c: Rational, i: u32, j: u32) -> Expr {
    Expr::Mul(vec![Expr::Const(c), Expr::x().pow(i as i64), Expr::y().pow(j as i64)])
}

/// Random polynomials of total degree at most 4 with small rational coefficients.
fn polynomial() -> impl Strategy<Value = Expr> {
    prop::collection::vec(((-5i64..=5), (1i64..=3), (0u32..=4), (0u32..=4)), 1..7).prop_map(|terms| {
        let parts: Vec<Expr> = terms
            .into_iter()
            .map(|(n, d, i, j)| monomial(rat(n, d), i, j.min(4 - i)))
            .collect();
        simplify(&Expr::Add(parts))
    })
}

fn small_point() -> impl Strategy<Value = LimitPoint> {
    ((-3i64..=3), (1i64..=2), (-3i64..=3), (1i64..=2)).prop_map(|(a, b, c, d)| LimitPoint::finite(rat(a, b), rat(c, d)))
}

/// Generated problems decide to their target, have the requested order, and
/// differ from the seed increment by exactly the correction polynomial.
pub fn generator_round_trip(cases: u32) -> Result<(), String> {
    let config = EngineConfig::default();
    let strategy = (polynomial(), polynomial(), small_point(), nonzero_rational(), 1u32..=2);
    runner(cases)
        .run(&strategy, |(f, g, p, k, order)| {
            let built = if order == 1 {
                construct_order1(&f, &g, &p, &k)
            } else {
                construct_order2(&f, &g, &p, &k)
            };
            let problem = match built {
                Ok(problem) => problem,
                Err(GeneratorError::Hypothesis(_)) => return Err(TestCaseError::reject("seed g fails the hypotheses")),
                Err(e) => return Err(fail(format!("f = {f}, g = {g}, p = {p}: {e}"))),
            };
            let context = || format!("f = {f}, g = {g}, p = {p}, k = {k}, order {order}");
            let verdict = decide(&problem.numerator, &problem.denominator, &p, &config)
                .map_err(|e| fail(format!("{}: {e}", context())))?;
            if verdict.result != LimitResult::Exists(Scalar::Exact(k.clone())) {
                return Err(fail(format!("{}: decided {}", context(), verdict.result)));
            }
            for (name, e) in [("numerator", &problem.numerator), ("denominator", &problem.denominator)] {
                let got = classify_order(e, &p, config.max_order)
                    .map_err(|e| fail(e.to_string()))?
                    .order();
                if got != Some(order) {
                    return Err(fail(format!("{}: {name} has order {got:?}", context())));
                }
            }
            // re-derive the target from the leading tensors
            let tf = derivative_tensor(&problem.numerator, &p, order).map_err(|e| fail(e.to_string()))?;
            let tg = derivative_tensor(&problem.denominator, &p, order).map_err(|e| fail(e.to_string()))?;
            match ratio_criterion(&tf, &tg).decision {
                RatioDecision::Equal(Scalar::Exact(r)) | RatioDecision::MixedZeros(Some(Scalar::Exact(r)))
                    if r == k => {}
                other => return Err(fail(format!("{}: ratio criterion gave {other:?}", context()))),
            }
            // the seed increment, computed here from scratch
            let (x0, y0) = p.finite_coords().expect("finite point");
            let fp = match eval(&f, &Env::xy(x0.clone(), y0.clone())) {
                Ok(hopital2d::EvalResult::Exact(r)) => r,
                other => return Err(fail(format!("f({p}) = {other:?}"))),
            };
            let mut base = f.clone() - Expr::Const(fp);
            if order == 2 {
                let t1 = derivative_tensor(&f, &p, 1).map_err(|e| fail(e.to_string()))?;
                let df = Expr::Const(t1.entries[0].as_exact().unwrap().clone()) * (Expr::x() - Expr::Const(x0.clone()))
                    + Expr::Const(t1.entries[1].as_exact().unwrap().clone()) * (Expr::y() - Expr::Const(y0.clone()));
                base = base - df;
            }
            let added = simplify(&(problem.numerator.clone() - base));
            if added != problem.correction {
                return Err(fail(format!(
                    "{}: numerator minus the seed increment is {added}, correction is {}",
                    context(),
                    problem.correction
                )));
            }
            let above = derivative_tensor(&problem.correction, &p, order + 1).map_err(|e| fail(e.to_string()))?;
            if above.entries.iter().any(|e| !e.is_zero()) {
                return Err(fail(format!("{}: correction has degree above {order}", context())));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn expected_of(r: &LimitResult) -> Option<Expected> {
    match r {
        LimitResult::Exists(Scalar::Exact(k)) => Some(Expected::Exists(k.clone())),
        LimitResult::NotExists => Some(Expected::NotExists),
        LimitResult::InfiniteMagnitude => Some(Expected::InfiniteMagnitude),
        _ => None,
    }
}

/// Scaling `f` by `c` scales the limit by `c`; swapping `f` and `g` inverts a
/// nonzero limit. Checked on the curated problems with random `c`.
pub fn equivariance(cases: u32) -> Result<(), String> {
    let config = EngineConfig::default();
    let problems = curated();
    runner(cases)
        .run(&(0..problems.len(), nonzero_rational()), |(i, c)| {
            let item = &problems[i];
            let (f, g, p) = (parse(item.num).unwrap(), parse(item.den).unwrap(), point(item.point));
            let base = decide(&f, &g, &p, &config).map_err(|e| fail(e.to_string()))?;
            let scaled_f = simplify(&(Expr::Const(c.clone()) * f.clone()));
            let scaled = decide(&scaled_f, &g, &p, &config).map_err(|e| fail(e.to_string()))?;
            match expected_of(&base.result) {
                Some(Expected::Exists(k)) => {
                    let want = LimitResult::Exists(Scalar::Exact(&c * &k));
                    if scaled.result != want {
                        return Err(fail(format!(
                            "{}/{} scaled by {c}: {} (want {want})",
                            item.num, item.den, scaled.result
                        )));
                    }
                    if !k.is_zero() {
                        let swapped = decide(&g, &f, &p, &config).map_err(|e| fail(e.to_string()))?;
                        let want = LimitResult::Exists(Scalar::Exact(k.recip()));
                        if swapped.result != want {
                            return Err(fail(format!(
                                "{}/{} swapped: {} (want {want})",
                                item.den, item.num, swapped.result
                            )));
                        }
                    }
                }
                Some(other) if expected_of(&scaled.result) != Some(other.clone()) => {
                    return Err(fail(format!(
                        "{}/{} scaled by {c}: {} (want {other:?})",
                        item.num, item.den, scaled.result
                    )));
                }
                _ => {}
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// For each zero pattern of `[f_x, f_y, g_x, g_y]` at the origin, a pair of
/// polynomials realizing it.
pub fn pattern_instance(zeros: [bool; 4]) -> (Expr, Expr) {
    let side = |zx: bool, zy: bool, a: &str, b: &str| {
        let tx = if zx { "x^2".to_string() } else { format!("{a}*x") };
        let ty = if zy { "y^2".to_string() } else { format!("{b}*y") };
        parse(&format!("{tx}+{ty}")).unwrap()
    };
    (side(zeros[0], zeros[1], "2", "3"), side(zeros[2], zeros[3], "5", "-7"))
}

/// Every zero pattern maps to one label, is realized by its instance, and the
/// engine returns a verdict under that label (or an order-n label after escalation).
pub fn dispatch_totality() -> Result<(), String> {
    let config = EngineConfig::default();
    let origin = LimitPoint::origin();
    let mut labels = std::collections::BTreeSet::new();
    for bits in 0u8..16 {
        let zeros = [bits & 8 != 0, bits & 4 != 0, bits & 2 != 0, bits & 1 != 0];
        let label = first_order_case(zeros);
        labels.insert(label.to_string());
        let (f, g) = pattern_instance(zeros);
        let tf = derivative_tensor(&f, &origin, 1).map_err(|e| e.to_string())?;
        let tg = derivative_tensor(&g, &origin, 1).map_err(|e| e.to_string())?;
        let realized = [
            tf.entries[0].is_zero(),
            tf.entries[1].is_zero(),
            tg.entries[0].is_zero(),
            tg.entries[1].is_zero(),
        ];
        if realized != zeros {
            return Err(format!("{f} / {g} realizes {realized:?}, not {zeros:?}"));
        }
        let v = decide(&f, &g, &origin, &config).map_err(|e| format!("{f} / {g}: {e}"))?;
        let consistent = match label {
            CaseLabel::Case5Escalate => matches!(
                v.case,
                CaseLabel::TheoremN(_) | CaseLabel::MixedZeroConventionN(_) | CaseLabel::OrderMismatch
            ),
            _ => v.case == label,
        };
        if !consistent {
            return Err(format!("pattern {zeros:?}: dispatch {label}, verdict {}", v.case));
        }
    }
    if labels.len() != 8 {
        return Err(format!("expected 8 first-order labels, saw {labels:?}"));
    }
    Ok(())
}

/// Evaluates `f64_eval` and the crate's evaluator at one point, for callers
/// that want to compare them.
pub fn both_evaluators(e: &Expr, x: &Rational, y: &Rational) -> (Option<f64>, f64) {
    (to_f64(e, x, y), f64_eval(e, x.to_f64_lossy(), y.to_f64_lossy()))
}
