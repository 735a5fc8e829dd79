//! The decision engine.
//!
//! `decide` classifies the form of `f/g` at the point, rewrites ∞/∞, 0·∞ and
//! points at infinity into a 0/0 form at a finite point, and then compares the
//! partial derivatives of numerator and denominator: first through the
//! first-order zero-pattern dispatch, then order by order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::calculus::{
    classify_at, tensor_at, value_at, CalculusError, Coord, DerivativeTensor, LimitPoint, OrderClassification,
    PartialTable, Site,
};
use crate::expr::poly::clear_quotient;
use crate::expr::{simplify, substitute_raw, Expr, Rational, Var};
use crate::scalar::{serialize_f64, RationalJson, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Highest derivative order examined before giving up.
    pub max_order: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_order: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SoundnessFlag {
    /// A zero test relied on the float threshold.
    FloatZero,
    /// The denominator's leading directional coefficient vanishes along a real direction.
    DegenerateDirection,
    /// The verdict uses a rule the underlying theorems do not cover.
    BeyondPaper,
}

/// Which rule produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// Not an indeterminate form; the value was read off directly.
    Direct,
    Theorem1,
    Case1OneDerivativeZero,
    Case2MatchedXZero,
    Case2MatchedYZero,
    Case3CrossedZeros,
    Case4NumeratorFlat,
    Case4DenominatorFlat,
    Case5Escalate,
    TheoremN(u32),
    MixedZeroConventionN(u32),
    OrderMismatch,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseLabel::Direct => f.write_str("Direct"),
            CaseLabel::Theorem1 => f.write_str("Theorem1"),
            CaseLabel::Case1OneDerivativeZero => f.write_str("Case1_OneDerivativeZero"),
            CaseLabel::Case2MatchedXZero => f.write_str("Case2_MatchedXZero"),
            CaseLabel::Case2MatchedYZero => f.write_str("Case2_MatchedYZero"),
            CaseLabel::Case3CrossedZeros => f.write_str("Case3_CrossedZeros"),
            CaseLabel::Case4NumeratorFlat => f.write_str("Case4_NumeratorFlat"),
            CaseLabel::Case4DenominatorFlat => f.write_str("Case4_DenominatorFlat"),
            CaseLabel::Case5Escalate => f.write_str("Case5_Escalate"),
            CaseLabel::TheoremN(n) => write!(f, "TheoremN({n})"),
            CaseLabel::MixedZeroConventionN(n) => write!(f, "MixedZeroConventionN({n})"),
            CaseLabel::OrderMismatch => f.write_str("OrderMismatch"),
        }
    }
}

impl Serialize for CaseLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The case for a zero pattern of `[f_x, f_y, g_x, g_y]` (true = zero).
///
/// Total over all 16 patterns.
pub fn first_order_case(zeros: [bool; 4]) -> CaseLabel {
    let [fx, fy, gx, gy] = zeros;
    match zeros.iter().filter(|z| **z).count() {
        0 => CaseLabel::Theorem1,
        1 => CaseLabel::Case1OneDerivativeZero,
        4 => CaseLabel::Case5Escalate,
        _ if fx && fy => CaseLabel::Case4NumeratorFlat,
        _ if gx && gy => CaseLabel::Case4DenominatorFlat,
        // exactly two zeros, one on each side
        _ if fx && gx => CaseLabel::Case2MatchedXZero,
        _ if fy && gy => CaseLabel::Case2MatchedYZero,
        _ => CaseLabel::Case3CrossedZeros,
    }
}

/// Value of a quotient that is not indeterminate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum DirectValue {
    Finite(Scalar),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum FormClass {
    ZeroOverZero {
        numerator: OrderClassification,
        denominator: OrderClassification,
    },
    InfOverInf,
    ZeroTimesInf,
    NotIndeterminate {
        value: DirectValue,
    },
    Unsupported {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum LimitResult {
    Exists(Scalar),
    NotExists,
    /// `|f/g|` grows without bound; the sign may depend on the direction.
    InfiniteMagnitude,
    Inconclusive(String),
}

impl LimitResult {
    pub fn exists_value(&self) -> Option<&Scalar> {
        match self {
            LimitResult::Exists(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for LimitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitResult::Exists(k) => write!(f, "exists, = {k}"),
            LimitResult::NotExists => f.write_str("does not exist"),
            LimitResult::InfiniteMagnitude => f.write_str("infinite magnitude"),
            LimitResult::Inconclusive(why) => write!(f, "inconclusive ({why})"),
        }
    }
}

/// One index of a ratio comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEntry {
    /// Number of `x` derivatives in this index.
    pub l: u32,
    pub f: Scalar,
    pub g: Scalar,
    pub ratio: RatioValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum RatioValue {
    Value(Scalar),
    Infinite,
    /// Both entries vanish; the index is skipped.
    MatchedZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum RatioDecision {
    Equal(Scalar),
    Unequal,
    /// Some indices were matched zeros; `Some(k)` when the survivors agree.
    MixedZeros(Option<Scalar>),
    Undecidable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioOutcome {
    pub decision: RatioDecision,
    pub ratios: Vec<RatioEntry>,
}

/// Compares the entries of two tensors of the same order.
pub fn ratio_criterion(tf: &DerivativeTensor, tg: &DerivativeTensor) -> RatioOutcome {
    assert_eq!(tf.order, tg.order, "tensors must have the same order");
    let n = tf.order;
    let mut ratios = Vec::new();
    let mut matched = 0;
    let mut one_sided = false;
    let mut values: Vec<Scalar> = Vec::new();
    for (i, (a, b)) in tf.entries.iter().zip(&tg.entries).enumerate() {
        let ratio = match (a.is_zero(), b.is_zero()) {
            (true, true) => {
                matched += 1;
                RatioValue::MatchedZero
            }
            (false, true) => {
                one_sided = true;
                RatioValue::Infinite
            }
            (true, false) => {
                one_sided = true;
                RatioValue::Value(Scalar::int(0))
            }
            (false, false) => {
                let k = a.div(b).expect("nonzero divisor");
                values.push(k.clone());
                RatioValue::Value(k)
            }
        };
        ratios.push(RatioEntry {
            l: n - i as u32,
            f: a.clone(),
            g: b.clone(),
            ratio,
        });
    }
    let common = match values.split_first() {
        Some((k, rest)) if !one_sided && rest.iter().all(|r| r.approx_eq(k)) => Some(k.clone()),
        _ => None,
    };
    let decision = if matched == ratios.len() {
        RatioDecision::Undecidable
    } else if matched > 0 {
        RatioDecision::MixedZeros(common)
    } else {
        match common {
            Some(k) => RatioDecision::Equal(k),
            None => RatioDecision::Unequal,
        }
    };
    RatioOutcome { decision, ratios }
}

/// A line direction `(dx, dy)` with the limit of the leading-order quotient along it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "serialize_direction")]
    pub direction: (Rational, Rational),
    pub value: DirectValue,
}

fn serialize_direction<S: Serializer>(d: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
    (RationalJson(&d.0), RationalJson(&d.1)).serialize(s)
}

/// A direction along which the denominator's leading coefficient vanishes,
/// given as the slope `dy/dx` (infinite for the vertical direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateSlope(pub f64);

impl Serialize for DegenerateSlope {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_f64(self.0, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransformKind {
    /// Infinite coordinates moved to the origin by `x = 1/u`, `y = 1/v`.
    PointAtInfinity,
    /// `f/g` with both infinite rewritten as `(1/g)/(1/f)`.
    Reciprocal,
    /// `f·g` rewritten as `f/(1/g)`.
    ProductToQuotient,
}

/// A rewrite applied before the criteria ran.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transform {
    pub kind: TransformKind,
    pub numerator: Expr,
    pub denominator: Expr,
    /// Differentiation variables after the rewrite.
    pub variables: (Var, Var),
    pub point: LimitPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitVerdict {
    pub result: LimitResult,
    pub case: CaseLabel,
    /// Derivative order at which the decision was taken.
    pub order: Option<u32>,
    pub ratios: Vec<RatioEntry>,
    pub soundness_flags: BTreeSet<SoundnessFlag>,
    pub witnesses: Vec<Witness>,
    pub degenerate_directions: Vec<DegenerateSlope>,
    pub numerator_tensor: Option<DerivativeTensor>,
    pub denominator_tensor: Option<DerivativeTensor>,
    pub form: FormClass,
    pub transforms: Vec<Transform>,
    pub note: Option<String>,
}

impl LimitVerdict {
    fn new(result: LimitResult, case: CaseLabel, form: FormClass) -> Self {
        LimitVerdict {
            result,
            case,
            order: None,
            ratios: Vec::new(),
            soundness_flags: BTreeSet::new(),
            witnesses: Vec::new(),
            degenerate_directions: Vec::new(),
            numerator_tensor: None,
            denominator_tensor: None,
            form,
            transforms: Vec::new(),
            note: None,
        }
    }

    pub fn has_flag(&self, flag: SoundnessFlag) -> bool {
        self.soundness_flags.contains(&flag)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("unsupported form: {0}")]
    Unsupported(String),
}

/// How an expression behaves as the point is approached.
#[derive(Debug, Clone, PartialEq)]
enum Approach {
    Finite(Scalar),
    Infinite,
    Unknown(String),
}

fn approach(e: &Expr, site: &Site) -> Approach {
    match value_at(e, site) {
        Ok(v) => Approach::Finite(v),
        Err(err) => structural_approach(e, site).unwrap_or(Approach::Unknown(err.to_string())),
    }
}

fn is_finite_zero(a: &Approach) -> bool {
    matches!(a, Approach::Finite(v) if v.is_zero())
}

/// Recognizes `nonzero/0`-shaped subterms that blow up at the point.
fn structural_approach(e: &Expr, site: &Site) -> Option<Approach> {
    let quotient = |top: Approach, bottom: Vec<Approach>| -> Option<Approach> {
        let any_zero = bottom.iter().any(is_finite_zero);
        let all_finite = bottom.iter().all(|b| matches!(b, Approach::Finite(_)));
        match top {
            Approach::Finite(v) if !v.is_zero() && all_finite && any_zero => Some(Approach::Infinite),
            Approach::Infinite if all_finite => Some(Approach::Infinite),
            _ => None,
        }
    };
    match e {
        Expr::Div(a, b) => quotient(approach(a, site), vec![approach(b, site)]),
        Expr::Pow(b, n) if *n < 0 => is_finite_zero(&approach(b, site)).then_some(Approach::Infinite),
        Expr::Pow(b, _) => (approach(b, site) == Approach::Infinite).then_some(Approach::Infinite),
        Expr::Mul(xs) => {
            let mut top = Vec::new();
            let mut bottom = Vec::new();
            for x in xs {
                match x {
                    Expr::Pow(b, n) if *n < 0 => bottom.push((**b).clone()),
                    other => top.push(other.clone()),
                }
            }
            if bottom.is_empty() {
                // a product of finite nonzero factors and blow-ups
                let parts: Vec<Approach> = top.iter().map(|t| approach(t, site)).collect();
                let blows = parts.contains(&Approach::Infinite);
                let rest_ok = parts
                    .iter()
                    .all(|p| matches!(p, Approach::Infinite) || matches!(p, Approach::Finite(v) if !v.is_zero()));
                return (blows && rest_ok).then_some(Approach::Infinite);
            }
            let top_expr = if top.is_empty() { Expr::int(1) } else { Expr::Mul(top) };
            quotient(
                approach(&top_expr, site),
                bottom.iter().map(|b| approach(b, site)).collect(),
            )
        }
        Expr::Add(xs) => {
            let parts: Vec<Approach> = xs.iter().map(|t| approach(t, site)).collect();
            let infinite = parts.iter().filter(|p| **p == Approach::Infinite).count();
            let finite = parts.iter().filter(|p| matches!(p, Approach::Finite(_))).count();
            (infinite == 1 && finite + 1 == parts.len()).then_some(Approach::Infinite)
        }
        Expr::Neg(a) => (approach(a, site) == Approach::Infinite).then_some(Approach::Infinite),
        Expr::Func(crate::expr::FuncKind::Ln, a) => is_finite_zero(&approach(a, site)).then_some(Approach::Infinite),
        _ => None,
    }
}

/// A quotient prepared for the criteria: both sides over a finite site.
struct Problem {
    num: Expr,
    den: Expr,
    site: Site,
    transforms: Vec<Transform>,
}

fn site_point(site: &Site) -> LimitPoint {
    LimitPoint::finite(site.at.0.clone(), site.at.1.clone())
}

/// Moves infinite coordinates to the origin and clears denominators.
fn prepare(f: &Expr, g: &Expr, p: &LimitPoint) -> Result<Problem, EngineError> {
    if !p.is_infinite() {
        let site = Site::xy(p)?;
        return Ok(Problem {
            num: simplify(f),
            den: simplify(g),
            site,
            transforms: Vec::new(),
        });
    }
    let mut bindings = BTreeMap::new();
    let mut axes = (Var::X, Var::Y);
    let mut at = (Rational::zero(), Rational::zero());
    for (var, new_var, coord, axis, value) in [
        (Var::X, Var::U, &p.x, &mut axes.0, &mut at.0),
        (Var::Y, Var::V, &p.y, &mut axes.1, &mut at.1),
    ] {
        match coord {
            Coord::Finite(r) => *value = r.clone(),
            Coord::MinusInfinity => {
                bindings.insert(var, -(Expr::int(1) / Expr::var(new_var)));
                *axis = new_var;
            }
            Coord::PlusInfinity | Coord::Infinity => {
                bindings.insert(var, Expr::int(1) / Expr::var(new_var));
                *axis = new_var;
            }
        }
    }
    let fs = substitute_raw(f, &bindings);
    let gs = substitute_raw(g, &bindings);
    let (num, den) = clear_quotient(&fs, &gs).ok_or_else(|| {
        EngineError::Unsupported("at a point at infinity only rational functions can be normalized".into())
    })?;
    let site = Site { axes, at };
    let transforms = vec![Transform {
        kind: TransformKind::PointAtInfinity,
        numerator: num.clone(),
        denominator: den.clone(),
        variables: axes,
        point: site_point(&site),
    }];
    Ok(Problem {
        num,
        den,
        site,
        transforms,
    })
}

/// Memoized derivative data for one side of the quotient.
struct Side {
    table: PartialTable,
    classification: OrderClassification,
}

fn form_of(
    num: &Expr,
    den: &Expr,
    site: &Site,
    config: &EngineConfig,
) -> Result<(FormClass, Option<(Side, Side)>), EngineError> {
    let af = approach(num, site);
    let ag = approach(den, site);
    let form = match (&af, &ag) {
        (Approach::Unknown(why), _) | (_, Approach::Unknown(why)) => FormClass::Unsupported { reason: why.clone() },
        (Approach::Infinite, Approach::Infinite) => FormClass::InfOverInf,
        (Approach::Infinite, Approach::Finite(_)) => FormClass::NotIndeterminate {
            value: DirectValue::Infinite,
        },
        (Approach::Finite(_), Approach::Infinite) => FormClass::NotIndeterminate {
            value: DirectValue::Finite(Scalar::int(0)),
        },
        (Approach::Finite(a), Approach::Finite(b)) => match (a.is_zero(), b.is_zero()) {
            (_, false) => FormClass::NotIndeterminate {
                value: DirectValue::Finite(a.div(b).expect("nonzero divisor")),
            },
            (false, true) => FormClass::NotIndeterminate {
                value: DirectValue::Infinite,
            },
            (true, true) => {
                let mut tf = PartialTable::new(num, site.axes);
                let mut tg = PartialTable::new(den, site.axes);
                let cf = classify_at(&mut tf, site, config.max_order)?;
                let cg = classify_at(&mut tg, site, config.max_order)?;
                let form = FormClass::ZeroOverZero {
                    numerator: cf.clone(),
                    denominator: cg.clone(),
                };
                let sides = (
                    Side {
                        table: tf,
                        classification: cf,
                    },
                    Side {
                        table: tg,
                        classification: cg,
                    },
                );
                return Ok((form, Some(sides)));
            }
        },
    };
    Ok((form, None))
}

/// Classifies the form of `f/g` at `p`.
///
/// Points at infinity are moved to the origin first, so the returned class
/// describes the rewritten quotient.
pub fn classify_form(f: &Expr, g: &Expr, p: &LimitPoint) -> Result<FormClass, EngineError> {
    classify_form_with(f, g, p, &EngineConfig::default())
}

pub fn classify_form_with(f: &Expr, g: &Expr, p: &LimitPoint, config: &EngineConfig) -> Result<FormClass, EngineError> {
    let problem = prepare(f, g, p)?;
    Ok(form_of(&problem.num, &problem.den, &problem.site, config)?.0)
}

/// Rewrites ∞/∞ and points at infinity as a 0/0 candidate.
///
/// Returns the new numerator, denominator, differentiation variables and point.
pub fn to_zero_over_zero(
    f: &Expr,
    g: &Expr,
    p: &LimitPoint,
) -> Result<(Expr, Expr, (Var, Var), LimitPoint), EngineError> {
    let problem = prepare(f, g, p)?;
    let (num, den) = match approach_pair(&problem) {
        (Approach::Infinite, Approach::Infinite) => reciprocal_pair(&problem.num, &problem.den),
        _ => (problem.num.clone(), problem.den.clone()),
    };
    Ok((num, den, problem.site.axes, site_point(&problem.site)))
}

fn approach_pair(problem: &Problem) -> (Approach, Approach) {
    (
        approach(&problem.num, &problem.site),
        approach(&problem.den, &problem.site),
    )
}

fn reciprocal_pair(f: &Expr, g: &Expr) -> (Expr, Expr) {
    (
        simplify(&(Expr::int(1) / g.clone())),
        simplify(&(Expr::int(1) / f.clone())),
    )
}

/// Decides `lim f/g` at `p`.
pub fn decide(f: &Expr, g: &Expr, p: &LimitPoint, config: &EngineConfig) -> Result<LimitVerdict, EngineError> {
    let problem = prepare(f, g, p)?;
    decide_problem(problem, config, 0)
}

/// Decides `lim f·g` at `p`, rewriting 0·∞ as a quotient.
pub fn decide_product(f: &Expr, g: &Expr, p: &LimitPoint, config: &EngineConfig) -> Result<LimitVerdict, EngineError> {
    let recip = |e: &Expr| simplify(&(Expr::int(1) / e.clone()));
    if !p.is_infinite() {
        let site = Site::xy(p)?;
        let (af, ag) = (approach(f, &site), approach(g, &site));
        if let (Approach::Finite(a), Approach::Finite(b)) = (&af, &ag) {
            let form = FormClass::NotIndeterminate {
                value: DirectValue::Finite(a.mul(b)),
            };
            let mut v = LimitVerdict::new(LimitResult::Exists(a.mul(b)), CaseLabel::Direct, form);
            mark_float(&mut v, a.is_float_zero() || b.is_float_zero());
            return Ok(v);
        }
        // keep the vanishing factor on top and the blow-up as a reciprocal below
        let (num, den) = if ag == Approach::Infinite || !is_finite_zero(&ag) {
            (f.clone(), recip(g))
        } else {
            (g.clone(), recip(f))
        };
        let problem = Problem {
            transforms: vec![Transform {
                kind: TransformKind::ProductToQuotient,
                numerator: simplify(&num),
                denominator: den.clone(),
                variables: site.axes,
                point: p.clone(),
            }],
            num: simplify(&num),
            den,
            site,
        };
        return decide_problem(problem, config, 0);
    }
    let mut verdict = decide(f, &recip(g), p, config)?;
    verdict.transforms.insert(
        0,
        Transform {
            kind: TransformKind::ProductToQuotient,
            numerator: simplify(f),
            denominator: recip(g),
            variables: (Var::X, Var::Y),
            point: p.clone(),
        },
    );
    Ok(verdict)
}

fn mark_float(v: &mut LimitVerdict, float_zero: bool) {
    if float_zero {
        v.soundness_flags.insert(SoundnessFlag::FloatZero);
    }
}

fn decide_problem(problem: Problem, config: &EngineConfig, depth: u32) -> Result<LimitVerdict, EngineError> {
    let (form, sides) = form_of(&problem.num, &problem.den, &problem.site, config)?;
    let mut verdict = match form {
        FormClass::Unsupported { reason } => return Err(EngineError::Unsupported(reason)),
        FormClass::InfOverInf | FormClass::ZeroTimesInf if depth == 0 => {
            let (num, den) = reciprocal_pair(&problem.num, &problem.den);
            let mut transforms = problem.transforms;
            transforms.push(Transform {
                kind: TransformKind::Reciprocal,
                numerator: num.clone(),
                denominator: den.clone(),
                variables: problem.site.axes,
                point: site_point(&problem.site),
            });
            let next = Problem {
                num,
                den,
                site: problem.site,
                transforms,
            };
            return decide_problem(next, config, depth + 1);
        }
        FormClass::InfOverInf | FormClass::ZeroTimesInf => {
            return Err(EngineError::Unsupported(
                "the reciprocal rewrite did not produce a 0/0 form".into(),
            ))
        }
        FormClass::NotIndeterminate { ref value } => {
            let result = match value {
                DirectValue::Finite(v) => LimitResult::Exists(v.clone()),
                DirectValue::Infinite => LimitResult::InfiniteMagnitude,
            };
            LimitVerdict::new(result, CaseLabel::Direct, form.clone())
        }
        FormClass::ZeroOverZero { .. } => {
            let (f_side, g_side) = sides.expect("0/0 forms carry derivative data");
            zero_over_zero(f_side, g_side, &problem.site, form, config)?
        }
    };
    verdict.transforms = problem.transforms;
    Ok(verdict)
}

fn zero_over_zero(
    mut f: Side,
    mut g: Side,
    site: &Site,
    form: FormClass,
    config: &EngineConfig,
) -> Result<LimitVerdict, EngineError> {
    let t1f = tensor_at(&mut f.table, site, 1)?;
    let t1g = tensor_at(&mut g.table, site, 1)?;
    let zeros = [
        t1f.entries[0].is_zero(),
        t1f.entries[1].is_zero(),
        t1g.entries[0].is_zero(),
        t1g.entries[1].is_zero(),
    ];
    let case = first_order_case(zeros);
    let float_zero =
        f.classification.float_zero || g.classification.float_zero || t1f.has_float_zero() || t1g.has_float_zero();
    let ratios = ratio_criterion(&t1f, &t1g);

    let mut v = LimitVerdict::new(LimitResult::NotExists, case, form);
    v.order = Some(1);
    v.ratios = ratios.ratios.clone();
    mark_float(&mut v, float_zero);

    match case {
        CaseLabel::Theorem1 => match ratios.decision {
            RatioDecision::Equal(k) => v.result = LimitResult::Exists(k),
            _ => v.witnesses = line_witnesses(&t1f, &t1g),
        },
        CaseLabel::Case1OneDerivativeZero | CaseLabel::Case3CrossedZeros => {
            v.witnesses = line_witnesses(&t1f, &t1g);
        }
        CaseLabel::Case2MatchedXZero => {
            v.result = LimitResult::Exists(t1f.entries[1].div(&t1g.entries[1]).expect("g_y nonzero"));
        }
        CaseLabel::Case2MatchedYZero => {
            v.result = LimitResult::Exists(t1f.entries[0].div(&t1g.entries[0]).expect("g_x nonzero"));
        }
        CaseLabel::Case4NumeratorFlat => v.result = LimitResult::Exists(Scalar::int(0)),
        CaseLabel::Case4DenominatorFlat => {
            v.result = LimitResult::InfiniteMagnitude;
            v.soundness_flags.insert(SoundnessFlag::BeyondPaper);
        }
        CaseLabel::Case5Escalate => escalate(&mut v, &mut f, &mut g, site, config)?,
        _ => unreachable!("first-order dispatch yields first-order labels"),
    }
    v.numerator_tensor.get_or_insert(t1f);
    v.denominator_tensor.get_or_insert(t1g);
    Ok(v)
}

/// Both gradients vanish: compare the orders and then the order-`n` tensors.
fn escalate(
    v: &mut LimitVerdict,
    f: &mut Side,
    g: &mut Side,
    site: &Site,
    config: &EngineConfig,
) -> Result<(), EngineError> {
    let of = f.classification.order();
    let og = g.classification.order();
    match (of, og) {
        (None, None) => {
            v.result = LimitResult::Inconclusive(format!(
                "numerator and denominator both vanish to order above {}",
                config.max_order
            ));
            v.order = None;
        }
        (Some(n), Some(m)) if n == m => {
            let tf = f.classification.witness.clone().expect("order has a witness");
            let tg = g.classification.witness.clone().expect("order has a witness");
            let outcome = ratio_criterion(&tf, &tg);
            let all_nonzero = tf.all_nonzero() && tg.all_nonzero();
            v.order = Some(n);
            v.ratios = outcome.ratios;
            v.case = if all_nonzero {
                CaseLabel::TheoremN(n)
            } else {
                v.soundness_flags.insert(SoundnessFlag::BeyondPaper);
                CaseLabel::MixedZeroConventionN(n)
            };
            match outcome.decision {
                RatioDecision::Equal(k) | RatioDecision::MixedZeros(Some(k)) => {
                    v.result = LimitResult::Exists(k);
                    check_degenerate(v, &tg);
                }
                RatioDecision::Unequal | RatioDecision::MixedZeros(None) => {
                    v.result = LimitResult::NotExists;
                    v.witnesses = line_witnesses(&tf, &tg);
                }
                RatioDecision::Undecidable => {
                    v.result = LimitResult::Inconclusive("every derivative index vanished on both sides".into());
                }
            }
            mark_float(v, tf.has_float_zero() || tg.has_float_zero());
            v.numerator_tensor = Some(tf);
            v.denominator_tensor = Some(tg);
        }
        _ => {
            // the side whose order is unknown vanishes beyond max_order
            let numerator_higher = match (of, og) {
                (Some(n), Some(m)) => n > m,
                (None, Some(_)) => true,
                _ => false,
            };
            v.case = CaseLabel::OrderMismatch;
            if numerator_higher {
                let tg = g.classification.witness.clone().expect("order has a witness");
                v.order = Some(tg.order);
                v.result = LimitResult::Exists(Scalar::int(0));
                check_degenerate(v, &tg);
                if let Some(n) = of {
                    v.numerator_tensor = Some(tensor_at(&mut f.table, site, n)?);
                }
                v.denominator_tensor = Some(tg);
            } else {
                let tf = f.classification.witness.clone().expect("order has a witness");
                v.order = Some(tf.order);
                v.result = LimitResult::InfiniteMagnitude;
                v.soundness_flags.insert(SoundnessFlag::BeyondPaper);
                v.numerator_tensor = Some(tf);
                if let Some(m) = og {
                    v.denominator_tensor = Some(tensor_at(&mut g.table, site, m)?);
                }
            }
        }
    }
    Ok(())
}

/// Flags an `Exists` verdict whose order-2+ denominator coefficient has a real root direction.
fn check_degenerate(v: &mut LimitVerdict, tg: &DerivativeTensor) {
    if tg.order < 2 {
        return;
    }
    let slopes = degenerate_slopes(tg);
    if !slopes.is_empty() {
        v.soundness_flags.insert(SoundnessFlag::DegenerateDirection);
        v.degenerate_directions = slopes;
    }
}

/// Real directions where `Σ C(n,i) b_i dx^(n-i) dy^i` vanishes, as slopes `dy/dx`.
pub fn degenerate_slopes(tg: &DerivativeTensor) -> Vec<DegenerateSlope> {
    let b: Vec<f64> = tg.entries.iter().map(Scalar::to_f64).collect();
    let n = tg.order as usize;
    let mut out = Vec::new();
    if tg.entries[n].is_zero() {
        out.push(DegenerateSlope(f64::INFINITY));
    }
    if n == 2 {
        // b_xx + 2 b_xy r + b_yy r^2
        let (bxx, bxy, byy) = (&tg.entries[0], &tg.entries[1], &tg.entries[2]);
        if byy.is_zero() {
            if !bxy.is_zero() {
                out.push(DegenerateSlope(-b[0] / (2.0 * b[1])));
            }
            return out;
        }
        let disc = bxy.mul(bxy).add(&bxx.mul(byy).neg());
        if disc.is_zero() {
            out.push(DegenerateSlope(-b[1] / b[2]));
        } else if disc.to_f64() > 0.0 {
            let root = disc.to_f64().sqrt();
            let mut rs = [(-b[1] - root) / b[2], (-b[1] + root) / b[2]];
            rs.sort_by(f64::total_cmp);
            out.extend(rs.map(DegenerateSlope));
        }
        return out;
    }
    // higher orders: scan the half circle of directions for sign changes
    let poly = |theta: f64| {
        let (c, s) = (theta.cos(), theta.sin());
        let mut acc = 0.0;
        let mut binom = 1.0;
        for (i, bi) in b.iter().enumerate() {
            acc += binom * bi * c.powi((n - i) as i32) * s.powi(i as i32);
            binom = binom * (n - i) as f64 / (i + 1) as f64;
        }
        acc
    };
    const STEPS: usize = 3600;
    let half = std::f64::consts::FRAC_PI_2;
    let mut prev = poly(-half + 1e-9);
    for k in 1..STEPS {
        let theta = -half + std::f64::consts::PI * k as f64 / STEPS as f64;
        let cur = poly(theta);
        if cur == 0.0 || prev.signum() != cur.signum() {
            out.push(DegenerateSlope(theta.tan()));
        }
        prev = cur;
    }
    out
}

/// Candidate line directions for witnesses, axes first.
const DIRECTIONS: [(i64, i64); 12] = [
    (1, 0),
    (0, 1),
    (1, 1),
    (1, -1),
    (1, 2),
    (1, -2),
    (2, 1),
    (2, -1),
    (1, 3),
    (1, -3),
    (3, 1),
    (3, -1),
];

/// Two line directions along which the leading-order quotient differs.
fn line_witnesses(tf: &DerivativeTensor, tg: &DerivativeTensor) -> Vec<Witness> {
    let extra = (4..=24).flat_map(|k| [(1, k), (1, -k), (k, 1), (k, -1)]);
    let mut found: Vec<Witness> = Vec::new();
    for (dx, dy) in DIRECTIONS.into_iter().chain(extra) {
        let (dx, dy) = (Rational::from_integer(dx.into()), Rational::from_integer(dy.into()));
        let a = tf.directional(&dx, &dy);
        let b = tg.directional(&dx, &dy);
        let value = match (a.is_zero(), b.is_zero()) {
            (_, false) => DirectValue::Finite(a.div(&b).expect("nonzero divisor")),
            (false, true) => DirectValue::Infinite,
            (true, true) => continue,
        };
        let distinct = found.iter().all(|w| match (&w.value, &value) {
            (DirectValue::Finite(p), DirectValue::Finite(q)) => !p.approx_eq(q),
            (DirectValue::Infinite, DirectValue::Infinite) => false,
            _ => true,
        });
        if distinct {
            found.push(Witness {
                direction: (dx, dy),
                value,
            });
            if found.len() == 2 {
                break;
            }
        }
    }
    found
}

/// The exact value of a verdict, when it is `Exists` with an exact scalar.
pub fn exact_value(v: &LimitVerdict) -> Option<&Rational> {
    v.result.exists_value().and_then(Scalar::as_exact)
}
