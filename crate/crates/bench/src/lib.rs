//! Fixed workloads shared by the benchmarks.

use hopital2d::{parse, Expr, LimitPoint};

/// A named limit problem.
pub struct Workload {
    pub name: &'static str,
    pub num: Expr,
    pub den: Expr,
    pub point: LimitPoint,
}

fn workload(name: &'static str, num: &str, den: &str, point: &str) -> Workload {
    Workload {
        name,
        num: parse(num).expect("workload numerator parses"),
        den: parse(den).expect("workload denominator parses"),
        point: point.parse().expect("workload point parses"),
    }
}

/// Problems covering the first-order, second-order, infinity and
/// transcendental paths of the engine.
pub fn workloads() -> Vec<Workload> {
    vec![
        workload("first_order", "x^2+2*x*y-3*y^2", "x^3-y^3", "1,1"),
        workload("second_order", "x^2+x*y+y^2", "x^2-x*y+y^2", "0,0"),
        workload(
            "generated_order2",
            "x^2*y+x^2+8*x*y-12*x+2*y^2-13*y+13",
            "x^2*y^2+x*y-3*x-3*y+4",
            "1,1",
        ),
        workload("at_infinity", "2*x^2+2*y^2+x+y", "3*x^2+3*y^2", "inf"),
        workload("sqrt", "x^2+y^2", "sqrt(x^2+y^2+1)-1", "0,0"),
    ]
}
