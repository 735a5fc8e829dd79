//! Numeric directional oracle.
//!
//! Samples `f/g` along monomial curves `t ↦ (x0 + ax·t^px, y0 + ay·t^py)` as
//! `t → 0⁺`, extrapolates each sequence, and aggregates the per-curve results
//! into an empirical verdict that can confirm or contradict the engine.
//! Samples are exact rationals whenever the inputs allow it and
//! high-precision approximations otherwise.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::calculus::{Coord, LimitPoint};
use crate::expr::{eval_num, precise, simplify, Env, Expr, Num, Rational, Var};
use crate::scalar::{format_rational, rational_to_f64, serialize_f64, RationalJson};

/// Default extrapolation tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Below this many trailing defined samples a curve is unusable.
const MIN_TRAILING: usize = 5;

/// Magnitude a diverging sequence must reach.
const DIVERGENCE_FLOOR: f64 = 1e3;

/// A monomial path into the limit point.
///
/// For a finite coordinate the path is `x0 + ax·t^px`; for an infinite one it
/// is `ax·t^(-px)`, with the sign of `ax` forced by a signed infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Curve {
    pub ax: Rational,
    pub px: u32,
    pub ay: Rational,
    pub py: u32,
}

impl Curve {
    pub fn new(ax: i64, px: u32, ay: i64, py: u32) -> Self {
        Curve {
            ax: Rational::from_integer(ax.into()),
            px,
            ay: Rational::from_integer(ay.into()),
            py,
        }
    }

    /// The line through the point with direction `(dx, dy)`.
    pub fn line(dx: Rational, dy: Rational) -> Self {
        Curve {
            ax: dx,
            px: 1,
            ay: dy,
            py: 1,
        }
    }

    pub fn is_line(&self) -> bool {
        self.px == 1 && self.py == 1
    }

    /// For a line, whether its direction lies within `max_angle` radians of
    /// the direction with slope `slope` (infinite for vertical).
    pub fn near_slope(&self, slope: f64, max_angle: f64) -> bool {
        if !self.is_line() {
            return false;
        }
        let line = rational_to_f64(&self.ay).atan2(rational_to_f64(&self.ax));
        let target = if slope.is_finite() {
            slope.atan()
        } else {
            std::f64::consts::FRAC_PI_2
        };
        // directions are compared modulo a half turn
        let d = (line - target).rem_euclid(std::f64::consts::PI);
        d.min(std::f64::consts::PI - d) <= max_angle
    }

    fn coord(&self, at: &Coord, a: &Rational, p: u32, t: &Rational) -> Result<Rational, String> {
        let tp = num_traits::pow(t.clone(), p as usize);
        match at {
            Coord::Finite(x0) => Ok(x0 + a * tp),
            _ if a.is_zero() => Err("zero amplitude on an infinite coordinate".into()),
            Coord::PlusInfinity => Ok(a.abs() / tp),
            Coord::MinusInfinity => Ok(-a.abs() / tp),
            Coord::Infinity => Ok(a / tp),
        }
    }

    /// The point on the curve at parameter `t`.
    pub fn point_at(&self, p: &LimitPoint, t: &Rational) -> Result<(Rational, Rational), String> {
        if self.px == 0 || self.py == 0 {
            return Err("exponents must be positive".into());
        }
        if self.ax.is_zero() && self.ay.is_zero() {
            return Err("both amplitudes are zero".into());
        }
        Ok((
            self.coord(&p.x, &self.ax, self.px, t)?,
            self.coord(&p.y, &self.ay, self.py, t)?,
        ))
    }

    /// `x(t)` and `y(t)` as expressions in the parameter variable `t`.
    pub fn parametrization(&self, p: &LimitPoint, t: Var) -> Option<(Expr, Expr)> {
        let piece = |at: &Coord, a: &Rational, k: u32| -> Option<Expr> {
            let tk = Expr::Var(t).pow(k as i64);
            let e = match at {
                Coord::Finite(x0) => Expr::Const(x0.clone()) + Expr::Const(a.clone()) * tk,
                _ if a.is_zero() => return None,
                Coord::PlusInfinity => Expr::Const(a.abs()) / tk,
                Coord::MinusInfinity => Expr::Const(-a.abs()) / tk,
                Coord::Infinity => Expr::Const(a.clone()) / tk,
            };
            Some(simplify(&e))
        };
        Some((piece(&p.x, &self.ax, self.px)?, piece(&p.y, &self.ay, self.py)?))
    }
}

fn monomial_label(a: &Rational, p: u32) -> String {
    let power = if p == 1 { "t".to_string() } else { format!("t^{p}") };
    if a.is_zero() {
        "0".into()
    } else if a.is_one() {
        power
    } else if (-a).is_one() {
        format!("-{power}")
    } else {
        format!("{}*{power}", format_rational(a))
    }
}

/// Displays the offsets, e.g. `(t, -t^2)`.
impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {})",
            monomial_label(&self.ax, self.px),
            monomial_label(&self.ay, self.py)
        )
    }
}

impl Serialize for Curve {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Curve", 5)?;
        st.serialize_field("ax", &RationalJson(&self.ax))?;
        st.serialize_field("px", &self.px)?;
        st.serialize_field("ay", &RationalJson(&self.ay))?;
        st.serialize_field("py", &self.py)?;
        st.serialize_field("label", &self.to_string())?;
        st.end()
    }
}

/// Parses `"ax,px,ay,py"`, e.g. `"1,1,1,4"` for `(t, t^4)`.
impl std::str::FromStr for Curve {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(format!("expected \"ax,px,ay,py\", got '{text}'"));
        }
        let amp = |s: &str| crate::scalar::parse_rational(s).ok_or_else(|| format!("invalid amplitude '{s}'"));
        let exp = |s: &str| match s.parse::<u32>() {
            Ok(n) if (1..=12).contains(&n) => Ok(n),
            _ => Err(format!("exponent must be an integer in 1..=12, got '{s}'")),
        };
        Ok(Curve {
            ax: amp(parts[0])?,
            px: exp(parts[1])?,
            ay: amp(parts[2])?,
            py: exp(parts[3])?,
        })
    }
}

/// Named curve families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveFamily {
    /// Lines, opposite rays, and parabolic and cubic arcs.
    Default,
    Lines,
    Arcs,
    /// The default family plus `count` random monomial curves from `seed`.
    Fuzz {
        seed: u64,
        count: usize,
    },
    Custom(Vec<Curve>),
}

impl CurveFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CurveFamily::Default => "default",
            CurveFamily::Lines => "lines",
            CurveFamily::Arcs => "arcs",
            CurveFamily::Fuzz { .. } => "fuzz",
            CurveFamily::Custom(_) => "custom",
        }
    }

    pub fn curves(&self) -> Vec<Curve> {
        match self {
            CurveFamily::Default => {
                let mut c = line_family();
                c.extend(arc_family());
                c
            }
            CurveFamily::Lines => line_family(),
            CurveFamily::Arcs => arc_family(),
            CurveFamily::Fuzz { seed, count } => {
                let mut c = CurveFamily::Default.curves();
                c.extend(fuzz_family(*seed, *count));
                c
            }
            CurveFamily::Custom(c) => c.clone(),
        }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Sixteen directions (both axes and slopes ±1, ±2, ±1/2, ±3, ±1/3, ±4, ±1/4)
/// plus the opposite rays of the axes and diagonals.
fn line_family() -> Vec<Curve> {
    let mut out = vec![Curve::line(q(1, 1), q(0, 1)), Curve::line(q(0, 1), q(1, 1))];
    for s in [q(1, 1), q(2, 1), q(1, 2), q(3, 1), q(1, 3), q(4, 1), q(1, 4)] {
        out.push(Curve::line(q(1, 1), s.clone()));
        out.push(Curve::line(q(1, 1), -s));
    }
    for (dx, dy) in [(-1, 0), (0, -1), (-1, -1), (-1, 1)] {
        out.push(Curve::line(q(dx, 1), q(dy, 1)));
    }
    out
}

/// Parabolic and cubic arcs in all four sign quadrants.
fn arc_family() -> Vec<Curve> {
    let mut out = Vec::new();
    for (px, py) in [(1, 2), (2, 1), (1, 3), (3, 1)] {
        for (ax, ay) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            out.push(Curve::new(ax, px, ay, py));
        }
    }
    out
}

fn fuzz_family(seed: u64, count: usize) -> Vec<Curve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut amp = || {
                let n: i64 = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
                let d: i64 = rng.gen_range(1..=3);
                q(n, d)
            };
            let (ax, ay) = (amp(), amp());
            Curve {
                ax,
                px: rng.gen_range(1..=5),
                ay,
                py: rng.gen_range(1..=5),
            }
        })
        .collect()
}

/// The default sampling schedule `t = 10^-1, …, 10^-7`.
pub fn default_schedule() -> Vec<Rational> {
    (1..=7).map(|k| q(1, 10i64.pow(k))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum EstimateKind {
    Converged {
        #[serde(serialize_with = "ser_f64")]
        value: f64,
        #[serde(serialize_with = "ser_f64")]
        residual: f64,
        /// Every sample and the extrapolation were exact rationals.
        exact: bool,
    },
    Diverged {
        sign: Sign,
    },
    Oscillating,
    /// Too few samples were defined along the curve.
    CurveUnusable {
        reason: String,
    },
}

fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    serialize_f64(*v, s)
}

fn ser_samples<S: Serializer>(v: &[Option<f64>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        match x {
            Some(f) if f.is_finite() => seq.serialize_element(f)?,
            Some(f) => seq.serialize_element(&if *f > 0.0 { "inf" } else { "-inf" })?,
            None => seq.serialize_element(&Option::<f64>::None)?,
        }
    }
    seq.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionalEstimate {
    pub curve: Curve,
    pub kind: EstimateKind,
    /// `f/g` at each schedule point; `None` where undefined.
    #[serde(serialize_with = "ser_samples")]
    pub samples: Vec<Option<f64>>,
}

impl DirectionalEstimate {
    pub fn converged_value(&self) -> Option<f64> {
        match self.kind {
            EstimateKind::Converged { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Outcome of extrapolating one sequence, keeping the high-precision value.
struct SequenceOutcome {
    kind: EstimateKind,
    value: Option<Num>,
}

fn to_num(r: Rational, exact: bool) -> Num {
    if exact {
        Num::Exact(r)
    } else {
        Num::Approx(precise::round(&r))
    }
}

/// Extrapolates a sequence sampled at `t_k = t_0·ρ^-k`.
///
/// The final value is the fully extrapolated entry over the last four samples;
/// the residual compares it with the same extrapolation one sample earlier.
fn extrapolate(samples: &[Option<Num>], ratio: &Rational, tol: f64) -> SequenceOutcome {
    let trailing = samples.iter().rev().take_while(|s| s.is_some()).count();
    if trailing < MIN_TRAILING {
        return SequenceOutcome {
            kind: EstimateKind::CurveUnusable {
                reason: format!("only {trailing} trailing samples are defined"),
            },
            value: None,
        };
    }
    let tail: Vec<&Num> = samples[samples.len() - MIN_TRAILING..]
        .iter()
        .map(|s| s.as_ref().unwrap())
        .collect();
    let exact = tail.iter().all(|n| n.is_exact());
    let vals: Vec<Rational> = tail.iter().map(|n| n.value().clone()).collect();
    let floats: Vec<f64> = vals.iter().map(rational_to_f64).collect();

    // growth test on the last three steps
    let last = &floats[floats.len() - 4..];
    let same_sign = last.iter().all(|v| *v > 0.0) || last.iter().all(|v| *v < 0.0);
    let growing = last.windows(2).all(|w| w[1].abs() >= 2.0 * w[0].abs());
    if same_sign && growing && last[3].abs() >= DIVERGENCE_FLOOR {
        let sign = if last[3] > 0.0 { Sign::Plus } else { Sign::Minus };
        return SequenceOutcome {
            kind: EstimateKind::Diverged { sign },
            value: None,
        };
    }

    let final_value = richardson(&vals[1..], ratio, exact);
    let previous = richardson(&vals[..4], ratio, exact);
    let residual = rational_to_f64(&(&final_value - &previous).abs());
    let value = rational_to_f64(&final_value);
    if value.is_finite() && residual < tol * value.abs().max(1.0) {
        SequenceOutcome {
            kind: EstimateKind::Converged { value, residual, exact },
            value: Some(to_num(final_value, exact)),
        }
    } else {
        SequenceOutcome {
            kind: EstimateKind::Oscillating,
            value: None,
        }
    }
}

/// Richardson table over `vals` (error expansion in integer powers of `t`),
/// returning the last diagonal entry.
fn richardson(vals: &[Rational], ratio: &Rational, exact: bool) -> Rational {
    let mut col: Vec<Rational> = vals.to_vec();
    let mut factor = Rational::one();
    for _ in 1..vals.len() {
        factor *= ratio;
        let denom = &factor - Rational::one();
        col = col
            .windows(2)
            .map(|w| {
                let r = (&factor * &w[1] - &w[0]) / &denom;
                if exact {
                    r
                } else {
                    precise::round(&r)
                }
            })
            .collect();
    }
    col.pop().expect("non-empty table")
}

fn sample_quotient(f: &Expr, g: &Expr, x: Rational, y: Rational) -> Option<Num> {
    let env = Env::xy(x, y);
    let fv = eval_num(f, &env).ok()?;
    let gv = eval_num(g, &env).ok()?;
    if gv.value().is_zero() {
        return None;
    }
    let r = fv.value() / gv.value();
    Some(to_num(r, fv.is_exact() && gv.is_exact()))
}

fn schedule_ratio(schedule: &[Rational]) -> Rational {
    match schedule {
        [a, b, ..] if !b.is_zero() => a / b,
        _ => q(10, 1),
    }
}

/// Estimates the limit of `f/g` along one curve with the default schedule.
pub fn estimate_along(f: &Expr, g: &Expr, p: &LimitPoint, c: &Curve, tol: f64) -> DirectionalEstimate {
    estimate_along_with(f, g, p, c, &default_schedule(), tol)
}

pub fn estimate_along_with(
    f: &Expr,
    g: &Expr,
    p: &LimitPoint,
    c: &Curve,
    schedule: &[Rational],
    tol: f64,
) -> DirectionalEstimate {
    let mut samples = Vec::with_capacity(schedule.len());
    for t in schedule {
        match c.point_at(p, t) {
            Ok((x, y)) => samples.push(sample_quotient(f, g, x, y)),
            Err(reason) => {
                return DirectionalEstimate {
                    curve: c.clone(),
                    kind: EstimateKind::CurveUnusable { reason },
                    samples: Vec::new(),
                }
            }
        }
    }
    let outcome = extrapolate(&samples, &schedule_ratio(schedule), tol);
    DirectionalEstimate {
        curve: c.clone(),
        kind: outcome.kind,
        samples: samples.iter().map(|s| s.as_ref().map(Num::to_f64)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum OracleKind {
    AllAgree {
        #[serde(serialize_with = "ser_f64")]
        value: f64,
    },
    /// Two converged curves whose values differ by more than `10·tol`.
    Disagree {
        a: usize,
        b: usize,
        #[serde(serialize_with = "ser_f64")]
        value_a: f64,
        #[serde(serialize_with = "ser_f64")]
        value_b: f64,
    },
    SomeDiverge,
    Unclear,
}

/// Estimates of `lim_x lim_y` and `lim_y lim_x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IteratedLimits {
    /// Inner limit in `y`, outer in `x`.
    pub lim_x_lim_y: EstimateKind,
    /// Inner limit in `x`, outer in `y`.
    pub lim_y_lim_x: EstimateKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleVerdict {
    pub kind: OracleKind,
    pub estimates: Vec<DirectionalEstimate>,
    pub iterated: IteratedLimits,
    #[serde(serialize_with = "ser_f64")]
    pub tol: f64,
}

impl OracleVerdict {
    /// The two curves named by a `Disagree` verdict.
    pub fn disagreeing_curves(&self) -> Option<(&DirectionalEstimate, &DirectionalEstimate)> {
        match self.kind {
            OracleKind::Disagree { a, b, .. } => Some((&self.estimates[a], &self.estimates[b])),
            _ => None,
        }
    }
}

/// Runs every curve of the family and aggregates the estimates.
pub fn verify(f: &Expr, g: &Expr, p: &LimitPoint, family: &[Curve], tol: f64) -> OracleVerdict {
    let f = simplify(f);
    let g = simplify(g);
    // rayon's ordered collect keeps the fold deterministic
    let estimates: Vec<DirectionalEstimate> = family.par_iter().map(|c| estimate_along(&f, &g, p, c, tol)).collect();
    let kind = aggregate(&estimates, tol);
    let iterated = IteratedLimits {
        lim_x_lim_y: iterated_limit(&f, &g, p, Var::X, tol),
        lim_y_lim_x: iterated_limit(&f, &g, p, Var::Y, tol),
    };
    OracleVerdict {
        kind,
        estimates,
        iterated,
        tol,
    }
}

fn scaled(tol: f64, a: f64, b: f64) -> f64 {
    tol * a.abs().max(b.abs()).max(1.0)
}

fn aggregate(estimates: &[DirectionalEstimate], tol: f64) -> OracleKind {
    let converged: Vec<(usize, f64)> = estimates
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.converged_value().map(|v| (i, v)))
        .collect();
    let lo = converged.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1));
    let hi = converged.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1));
    if let (Some((a, va)), Some((b, vb))) = (lo, hi) {
        if vb - va > 10.0 * scaled(tol, va, vb) {
            return OracleKind::Disagree {
                a,
                b,
                value_a: va,
                value_b: vb,
            };
        }
    }
    if estimates
        .iter()
        .any(|e| matches!(e.kind, EstimateKind::Diverged { .. }))
    {
        return OracleKind::SomeDiverge;
    }
    let usable = estimates
        .iter()
        .filter(|e| !matches!(e.kind, EstimateKind::CurveUnusable { .. }))
        .count();
    match (lo, hi) {
        (Some((_, va)), Some((_, vb))) if usable == converged.len() && vb - va < scaled(tol, va, vb) => {
            OracleKind::AllAgree {
                value: va + (vb - va) / 2.0,
            }
        }
        _ => OracleKind::Unclear,
    }
}

/// Approach values for one coordinate: `x0 + δ·10^-k`, or `±10^k/δ` toward
/// infinity.
fn approach_values(c: &Coord, delta: &Rational, count: u32) -> Vec<Rational> {
    (1..=count)
        .map(|k| {
            let step = delta * q(1, 10i64.pow(k));
            match c {
                Coord::Finite(x0) => x0 + step,
                Coord::PlusInfinity | Coord::Infinity => step.recip(),
                Coord::MinusInfinity => -step.recip(),
            }
        })
        .collect()
}

/// Distance of an outer sample from its target, as a scale for inner samples.
fn closeness(c: &Coord, value: &Rational) -> Rational {
    match c {
        Coord::Finite(x0) => (value - x0).abs(),
        _ => value.abs().recip(),
    }
}

const OUTER_SAMPLES: u32 = 6;
const INNER_SAMPLES: u32 = 7;

/// `lim_outer lim_inner f/g` where `outer` is the variable of the outer limit.
///
/// Inner samples are taken on a scale below the outer offset so that the
/// inner limit is resolved before the outer variable moves.
fn iterated_limit(f: &Expr, g: &Expr, p: &LimitPoint, outer: Var, tol: f64) -> EstimateKind {
    let (outer_coord, inner_coord) = match outer {
        Var::X => (&p.x, &p.y),
        _ => (&p.y, &p.x),
    };
    let ten = q(10, 1);
    let mut inner_limits = Vec::new();
    let mut inner_signs = Vec::new();
    for o in approach_values(outer_coord, &Rational::one(), OUTER_SAMPLES) {
        let delta = closeness(outer_coord, &o);
        let samples: Vec<Option<Num>> = approach_values(inner_coord, &delta, INNER_SAMPLES)
            .into_iter()
            .map(|i| {
                let (x, y) = if outer == Var::X {
                    (o.clone(), i)
                } else {
                    (i, o.clone())
                };
                sample_quotient(f, g, x, y)
            })
            .collect();
        let inner = extrapolate(&samples, &ten, tol);
        if let EstimateKind::Diverged { sign } = inner.kind {
            inner_signs.push(sign);
        }
        inner_limits.push(inner.value);
    }
    if inner_signs.len() == OUTER_SAMPLES as usize && inner_signs.windows(2).all(|w| w[0] == w[1]) {
        return EstimateKind::Diverged { sign: inner_signs[0] };
    }
    extrapolate(&inner_limits, &ten, tol).kind
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn intro_curves_at_infinity() {
        let (f, g) = (e("x^4+y^2"), e("x^2+y^4"));
        let p = LimitPoint::infinity();
        let a = estimate_along(&f, &g, &p, &Curve::new(1, 1, 1, 4), DEFAULT_TOL);
        assert!(matches!(a.kind, EstimateKind::Converged { value, .. } if value.abs() < 1e-9));
        let b = estimate_along(&f, &g, &p, &Curve::new(1, 2, 1, 1), DEFAULT_TOL);
        assert_eq!(b.kind, EstimateKind::Diverged { sign: Sign::Plus });
    }

    #[test]
    fn identical_numerator_and_denominator_converge_to_one() {
        let f = e("x*y+sin(x)");
        let est = estimate_along(&f, &f, &LimitPoint::ints(1, 2), &Curve::new(1, 1, 2, 3), DEFAULT_TOL);
        assert!(matches!(est.kind, EstimateKind::Converged { value, .. } if (value - 1.0).abs() < 1e-12));
    }

    #[test]
    fn worked_example_agrees() {
        let v = verify(
            &e("x^2+2*x*y-3*y^2"),
            &e("x^3-y^3"),
            &LimitPoint::ints(1, 1),
            &CurveFamily::Default.curves(),
            DEFAULT_TOL,
        );
        match v.kind {
            OracleKind::AllAgree { value } => assert!((value - 4.0 / 3.0).abs() < 1e-6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn counterexample_disagrees_on_diagonals() {
        let v = verify(
            &e("x^2+x*y+y^2"),
            &e("x^2-x*y+y^2"),
            &LimitPoint::origin(),
            &CurveFamily::Default.curves(),
            DEFAULT_TOL,
        );
        let (a, b) = v.disagreeing_curves().expect("disagreement");
        assert!(a.curve.is_line() && b.curve.is_line());
        assert!((a.converged_value().unwrap() - 1.0 / 3.0).abs() < 1e-6);
        assert!((b.converged_value().unwrap() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn sqrt_example_agrees_on_two() {
        let v = verify(
            &e("x^2+y^2"),
            &e("sqrt(x^2+y^2+1)-1"),
            &LimitPoint::origin(),
            &CurveFamily::Default.curves(),
            DEFAULT_TOL,
        );
        match v.kind {
            OracleKind::AllAgree { value } => assert!((value - 2.0).abs() < 1e-6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn iterated_limits_of_counterexample() {
        let v = verify(
            &e("x^2+x*y+y^2"),
            &e("x^2-x*y+y^2"),
            &LimitPoint::origin(),
            &CurveFamily::Lines.curves(),
            DEFAULT_TOL,
        );
        for it in [&v.iterated.lim_x_lim_y, &v.iterated.lim_y_lim_x] {
            assert!(matches!(it, EstimateKind::Converged { value, .. } if (value - 1.0).abs() < 1e-6));
        }
    }

    #[test]
    fn default_family_shape() {
        let lines = CurveFamily::Lines.curves();
        assert!(lines.len() >= 16);
        let arcs = CurveFamily::Arcs.curves();
        for (px, py) in [(1, 2), (2, 1), (1, 3), (3, 1)] {
            assert!(arcs.iter().any(|c| c.px == px && c.py == py));
        }
        let fuzz_a = CurveFamily::Fuzz { seed: 7, count: 5 }.curves();
        let fuzz_b = CurveFamily::Fuzz { seed: 7, count: 5 }.curves();
        assert_eq!(fuzz_a, fuzz_b);
    }

    #[test]
    fn unusable_curves_are_reported() {
        let est = estimate_along(
            &e("1"),
            &e("x"),
            &LimitPoint::infinity(),
            &Curve::new(0, 1, 1, 1),
            DEFAULT_TOL,
        );
        assert!(matches!(est.kind, EstimateKind::CurveUnusable { .. }));
        let est = estimate_along(
            &e("1"),
            &e("x-x"),
            &LimitPoint::origin(),
            &Curve::new(1, 1, 1, 1),
            DEFAULT_TOL,
        );
        assert!(matches!(est.kind, EstimateKind::CurveUnusable { .. }));
    }

    #[test]
    fn near_slope_is_modulo_half_turn() {
        let c = Curve::new(-1, 1, 1, 1);
        assert!(c.near_slope(-1.0, 1e-9));
        assert!(!c.near_slope(1.0, 0.1));
        assert!(Curve::new(0, 1, -1, 1).near_slope(f64::INFINITY, 1e-9));
        assert!(!Curve::new(1, 1, 1, 2).near_slope(0.0, 1.0));
    }

    #[test]
    fn parses_curves() {
        assert_eq!("1,1,1,4".parse::<Curve>().unwrap(), Curve::new(1, 1, 1, 4));
        assert!("1,0,1,1".parse::<Curve>().is_err());
        assert!("1,1,1".parse::<Curve>().is_err());
    }
}
