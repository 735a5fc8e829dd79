//! Plain-text rendering of reports, oracle tables and generated problems.

use std::fmt::Write;

use hopital2d::generator::GeneratedProblem;
use hopital2d::lhopital::{DirectValue, FormClass, RatioValue};
use hopital2d::oracle::{DirectionalEstimate, EstimateKind, OracleKind, Sign};
use hopital2d::report::{EngineSection, Mode, Report};
use hopital2d::scalar::format_rational;
use hopital2d::{format, LimitVerdict, OracleVerdict};

fn form_label(form: &FormClass) -> String {
    match form {
        FormClass::ZeroOverZero { .. } => "0/0".into(),
        FormClass::InfOverInf => "inf/inf".into(),
        FormClass::ZeroTimesInf => "0*inf".into(),
        FormClass::NotIndeterminate { value } => match value {
            DirectValue::Finite(v) => format!("not indeterminate (value {v})"),
            DirectValue::Infinite => "not indeterminate (infinite)".into(),
        },
        FormClass::Unsupported { reason } => format!("unsupported ({reason})"),
    }
}

/// Fixed-point display with values below the last digit shown as 0.
fn num(v: f64) -> String {
    if v.abs() < 5e-11 {
        "0".into()
    } else {
        format!("{v:.10}")
    }
}

fn sign(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

pub fn estimate_kind(kind: &EstimateKind) -> String {
    match kind {
        EstimateKind::Converged { value, residual, exact } => {
            let tag = if *exact { ", exact" } else { "" };
            format!("converged {} (residual {residual:.1e}{tag})", num(*value))
        }
        EstimateKind::Diverged { sign: s } => format!("diverged ({})", sign(*s)),
        EstimateKind::Oscillating => "no convergence".into(),
        EstimateKind::CurveUnusable { reason } => format!("unusable: {reason}"),
    }
}

fn oracle_summary(o: &OracleVerdict) -> String {
    let converged = o.estimates.iter().filter(|e| e.converged_value().is_some()).count();
    let head = match &o.kind {
        OracleKind::AllAgree { value } => format!("AllAgree, value {}", num(*value)),
        OracleKind::Disagree { a, b, value_a, value_b } => format!(
            "Disagree, {} -> {} vs {} -> {}",
            o.estimates[*a].curve,
            num(*value_a),
            o.estimates[*b].curve,
            num(*value_b)
        ),
        OracleKind::SomeDiverge => "SomeDiverge".into(),
        OracleKind::Unclear => "Unclear".into(),
    };
    format!("{head} ({converged}/{} curves converged)", o.estimates.len())
}

fn row(out: &mut String, e: &DirectionalEstimate, near: bool) {
    let mark = if near { "  [near degenerate direction]" } else { "" };
    let _ = writeln!(out, "  {:<28} {}{mark}", e.curve.to_string(), estimate_kind(&e.kind));
}

/// Per-curve table; rows listed in `near` are marked as near a degenerate direction.
pub fn oracle_table(o: &OracleVerdict, near: &[usize]) -> String {
    let mut out = String::new();
    for (i, e) in o.estimates.iter().enumerate() {
        row(&mut out, e, near.contains(&i));
    }
    let _ = writeln!(out, "iterated lim_x lim_y: {}", estimate_kind(&o.iterated.lim_x_lim_y));
    let _ = writeln!(out, "iterated lim_y lim_x: {}", estimate_kind(&o.iterated.lim_y_lim_x));
    let _ = writeln!(out, "verdict: {}", oracle_summary(o));
    out
}

fn verdict(out: &mut String, v: &LimitVerdict) {
    let order = v.order.map(|n| format!(", order {n}")).unwrap_or_default();
    let _ = writeln!(out, "engine: {} [{}{}]", v.result, v.case, order);
    if let (Some(tf), Some(tg)) = (&v.numerator_tensor, &v.denominator_tensor) {
        let show =
            |t: &hopital2d::DerivativeTensor| t.entries.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "  numerator tensor:   [{}]", show(tf));
        let _ = writeln!(out, "  denominator tensor: [{}]", show(tg));
    }
    if !v.ratios.is_empty() {
        let parts: Vec<String> = v
            .ratios
            .iter()
            .map(|r| match &r.ratio {
                RatioValue::Value(k) => k.to_string(),
                RatioValue::Infinite => "inf".into(),
                RatioValue::MatchedZero => "0/0".into(),
            })
            .collect();
        let _ = writeln!(out, "  ratios: {}", parts.join(", "));
    }
    if !v.soundness_flags.is_empty() {
        let flags: Vec<String> = v.soundness_flags.iter().map(|f| format!("{f:?}")).collect();
        let _ = writeln!(out, "  flags: {}", flags.join(", "));
    }
    for w in &v.witnesses {
        let value = match &w.value {
            DirectValue::Finite(s) => s.to_string(),
            DirectValue::Infinite => "inf".into(),
        };
        let _ = writeln!(
            out,
            "  witness direction ({}, {}) -> {value}",
            format_rational(&w.direction.0),
            format_rational(&w.direction.1)
        );
    }
    if !v.degenerate_directions.is_empty() {
        let slopes: Vec<String> = v
            .degenerate_directions
            .iter()
            .map(|s| {
                if s.0.is_finite() {
                    format!("{:.6}", s.0)
                } else {
                    "vertical".into()
                }
            })
            .collect();
        let _ = writeln!(out, "  degenerate slopes: {}", slopes.join(", "));
    }
    for t in &v.transforms {
        let _ = writeln!(
            out,
            "  rewrite {:?}: ({}) / ({}) at {}",
            t.kind,
            format(&t.numerator),
            format(&t.denominator),
            t.point
        );
    }
    if let Some(note) = &v.note {
        let _ = writeln!(out, "  note: {note}");
    }
}

pub fn report(r: &Report) -> String {
    let mut out = String::new();
    let op = match r.input.mode {
        Mode::Quotient => "/",
        Mode::Product => "*",
    };
    let _ = writeln!(
        out,
        "limit of ({}) {op} ({}) at {}",
        format(&r.input.numerator),
        format(&r.input.denominator),
        r.input.point
    );
    if let Some(form) = &r.input.form {
        let _ = writeln!(out, "form: {}", form_label(form));
    }
    match &r.engine {
        EngineSection::Ok { verdict: v } => verdict(&mut out, v),
        EngineSection::Unsupported { message } => {
            let _ = writeln!(out, "engine: unsupported ({message})");
        }
        EngineSection::Error { message } => {
            let _ = writeln!(out, "engine: error ({message})");
        }
    }
    if let Some(o) = &r.oracle {
        let _ = writeln!(out, "oracle: {}", oracle_summary(o));
    }
    let _ = writeln!(out, "agreement: {:?} ({})", r.agreement, r.agreement_detail);
    out
}

pub fn problem(p: &GeneratedProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", p.statement());
    let _ = writeln!(out, "order: {}", p.order);
    let _ = writeln!(out, "constants: {}", p.constants);
    if !p.flags.is_empty() {
        let flags: Vec<String> = p.flags.iter().map(|f| format!("{f:?}")).collect();
        let _ = writeln!(out, "flags: {}", flags.join(", "));
    }
    let _ = writeln!(out, "--- answer ---");
    let _ = writeln!(out, "numerator = {}", format(&p.numerator));
    let _ = writeln!(out, "denominator = {}", format(&p.denominator));
    let _ = writeln!(out, "limit = {}", format_rational(&p.target));
    let _ = writeln!(out, "rule = {}", p.verdict.case);
    out
}
