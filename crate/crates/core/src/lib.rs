//! Two-variable limit engine for indeterminate forms.
//!
//! The crate decides whether `lim f(x,y)/g(x,y)` exists at a point by comparing
//! the partial derivatives of numerator and denominator order by order, checks
//! every verdict against a numeric directional oracle, and can synthesize
//! classroom problems with a prescribed limit.
//!
//! Module map:
//! - [`expr`]: expression trees, parser, printer, simplifier, evaluator.
//! - [`calculus`]: symbolic partials, derivative tensors, infinitesimal order.
//! - [`lhopital`]: form classification, transformations, ratio criteria, verdicts.
//! - [`oracle`]: directional and iterated limit estimates along curve families.
//! - [`generator`]: construction of first- and second-order problems.
//! - [`report`]: the combined engine + oracle report used by the CLI.

pub mod calculus;
pub mod expr;
pub mod generator;
pub mod lhopital;
pub mod oracle;
pub mod report;
pub mod scalar;

pub use calculus::{
    classify_order, derivative_tensor, partial, Coord, DerivativeTensor, LimitPoint, OrderClassification, OrderKind,
};
pub use expr::{format, parse, simplify, substitute, EvalResult, Expr, FuncKind, Rational, Var};
pub use generator::{construct_order1, construct_order2, GeneratedProblem, GeneratorError};
pub use lhopital::{
    classify_form, decide, ratio_criterion, CaseLabel, EngineConfig, FormClass, LimitResult, LimitVerdict,
    SoundnessFlag,
};
pub use oracle::{estimate_along, verify, Curve, CurveFamily, DirectionalEstimate, OracleVerdict};
pub use scalar::Scalar;
