//! Engine verdict and oracle verdict side by side, with the agreement rule and
//! the exit-code contract used by the command-line tool.

use serde::Serialize;

use crate::calculus::LimitPoint;
use crate::expr::Expr;
use crate::lhopital::{decide, decide_product, EngineConfig, EngineError, FormClass, LimitResult, LimitVerdict};
use crate::oracle::{verify, Curve, OracleKind, OracleVerdict};

/// Version of the JSON report layout; bumped on any incompatible change.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// Whether the input is a quotient `f/g` or a product `f·g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Quotient,
    Product,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportInput {
    pub numerator: Expr,
    pub denominator: Expr,
    pub point: LimitPoint,
    pub mode: Mode,
    pub form: Option<FormClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EngineSection {
    Ok { verdict: Box<LimitVerdict> },
    Unsupported { message: String },
    Error { message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Agreement {
    Agree,
    Conflict,
    OracleSkipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub max_order: u32,
    pub tol: f64,
    pub curves: String,
    pub seed: Option<u64>,
    pub oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub input: ReportInput,
    pub engine: EngineSection,
    pub oracle: Option<OracleVerdict>,
    pub agreement: Agreement,
    /// One-line explanation of the agreement value.
    pub agreement_detail: String,
    pub config: ReportConfig,
}

impl Report {
    pub fn verdict(&self) -> Option<&LimitVerdict> {
        match &self.engine {
            EngineSection::Ok { verdict } => Some(verdict.as_ref()),
            _ => None,
        }
    }

    /// 0 for a decided verdict without conflict, 1 for an engine domain
    /// error, 2 for a conflict, 3 for an inconclusive or unsupported input.
    pub fn exit_code(&self) -> i32 {
        match &self.engine {
            EngineSection::Error { .. } => 1,
            EngineSection::Unsupported { .. } => 3,
            EngineSection::Ok { .. } if self.agreement == Agreement::Conflict => 2,
            EngineSection::Ok { verdict } => match verdict.result {
                LimitResult::Inconclusive(_) => 3,
                _ => 0,
            },
        }
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Compares an engine verdict with an oracle verdict.
///
/// Conflicts: `Exists` against `Disagree`, `NotExists` against `AllAgree`,
/// `Exists(k)` against `AllAgree(v)` with `v` more than `10·tol` away from `k`,
/// and `InfiniteMagnitude` against a finite `AllAgree`.
pub fn agreement(verdict: &LimitVerdict, oracle: &OracleVerdict) -> (Agreement, String) {
    let tol = oracle.tol;
    match (&verdict.result, &oracle.kind) {
        (LimitResult::Exists(k), OracleKind::Disagree { value_a, value_b, .. }) => (
            Agreement::Conflict,
            format!("engine found {k} but curves approach {value_a} and {value_b}"),
        ),
        (LimitResult::Exists(k), OracleKind::AllAgree { value }) => {
            if relative_gap(k.to_f64(), *value) > 10.0 * tol {
                (
                    Agreement::Conflict,
                    format!("engine found {k} but every curve approaches {value}"),
                )
            } else {
                (Agreement::Agree, format!("every curve approaches {value}"))
            }
        }
        (LimitResult::NotExists, OracleKind::AllAgree { value }) => (
            Agreement::Conflict,
            format!("engine found no limit but every curve approaches {value}"),
        ),
        (LimitResult::NotExists, OracleKind::Disagree { value_a, value_b, .. }) => {
            (Agreement::Agree, format!("curves approach {value_a} and {value_b}"))
        }
        (LimitResult::InfiniteMagnitude, OracleKind::AllAgree { value }) => (
            Agreement::Conflict,
            format!("engine found an infinite limit but every curve approaches {value}"),
        ),
        (_, kind) => (
            Agreement::Agree,
            format!("no contradiction; oracle verdict {}", kind_name(kind)),
        ),
    }
}

fn kind_name(kind: &OracleKind) -> &'static str {
    match kind {
        OracleKind::AllAgree { .. } => "AllAgree",
        OracleKind::Disagree { .. } => "Disagree",
        OracleKind::SomeDiverge => "SomeDiverge",
        OracleKind::Unclear => "Unclear",
    }
}

/// Runs the engine and, unless `curves` is `None`, the oracle.
pub fn build_report(
    f: &Expr,
    g: &Expr,
    p: &LimitPoint,
    mode: Mode,
    curves: Option<&[Curve]>,
    config: ReportConfig,
) -> Report {
    let engine_config = EngineConfig {
        max_order: config.max_order,
    };
    let decided = match mode {
        Mode::Quotient => decide(f, g, p, &engine_config),
        Mode::Product => decide_product(f, g, p, &engine_config),
    };
    let engine = match decided {
        Ok(verdict) => EngineSection::Ok {
            verdict: Box::new(verdict),
        },
        Err(EngineError::Unsupported(message)) => EngineSection::Unsupported { message },
        Err(e @ EngineError::Calculus(_)) => EngineSection::Error { message: e.to_string() },
    };
    let oracle = curves.map(|family| {
        let den = match mode {
            Mode::Quotient => g.clone(),
            Mode::Product => Expr::int(1) / g.clone(),
        };
        verify(f, &den, p, family, config.tol)
    });
    let (agreement, agreement_detail) = match (&engine, &oracle) {
        (_, None) => (Agreement::OracleSkipped, "oracle not run".to_string()),
        (EngineSection::Ok { verdict }, Some(o)) => agreement(verdict, o),
        (_, Some(o)) => (
            Agreement::Agree,
            format!("engine gave no verdict; oracle verdict {}", kind_name(&o.kind)),
        ),
    };
    let form = match &engine {
        EngineSection::Ok { verdict } => Some(verdict.form.clone()),
        _ => None,
    };
    Report {
        schema_version: SCHEMA_VERSION,
        input: ReportInput {
            numerator: f.clone(),
            denominator: g.clone(),
            point: p.clone(),
            mode,
            form,
        },
        engine,
        oracle,
        agreement,
        agreement_detail,
        config,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::oracle::{CurveFamily, DEFAULT_TOL};

    fn report(f: &str, g: &str, p: LimitPoint) -> Report {
        let config = ReportConfig {
            max_order: 4,
            tol: DEFAULT_TOL,
            curves: "default".into(),
            seed: None,
            oracle: true,
        };
        let curves = CurveFamily::Default.curves();
        build_report(
            &parse(f).unwrap(),
            &parse(g).unwrap(),
            &p,
            Mode::Quotient,
            Some(&curves),
            config,
        )
    }

    #[test]
    fn worked_example_agrees() {
        let r = report("x^2+2*x*y-3*y^2", "x^3-y^3", LimitPoint::ints(1, 1));
        assert_eq!(r.agreement, Agreement::Agree);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn counterexample_agrees_on_nonexistence() {
        let r = report("x^2+x*y+y^2", "x^2-x*y+y^2", LimitPoint::origin());
        assert_eq!(r.verdict().unwrap().result, LimitResult::NotExists);
        assert_eq!(r.agreement, Agreement::Agree);
    }

    #[test]
    fn first_order_theorem_can_conflict() {
        // proportional gradients, but along y = -x the quotient tends to 2
        let r = report("x+y+2*x^2", "x+y+x^2", LimitPoint::origin());
        assert_eq!(r.verdict().unwrap().result, LimitResult::Exists(crate::Scalar::int(1)));
        assert_eq!(r.agreement, Agreement::Conflict);
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn skipped_oracle() {
        let config = ReportConfig {
            max_order: 4,
            tol: DEFAULT_TOL,
            curves: "default".into(),
            seed: None,
            oracle: false,
        };
        let x = parse("x").unwrap();
        let r = build_report(&x, &x, &LimitPoint::origin(), Mode::Quotient, None, config);
        assert_eq!(r.agreement, Agreement::OracleSkipped);
        assert_eq!(r.exit_code(), 0);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["schema_version"], SCHEMA_VERSION);
        assert_eq!(json["engine"]["status"], "ok");
    }
}
