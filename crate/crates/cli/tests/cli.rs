use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::{Draft, JSONSchema};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hopital2d"));
    cmd.args(args).env_remove("HOPITAL2D_MAX_ORDER");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn schema(name: &str) -> JSONSchema {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "docs", name].iter().collect();
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let value: Value = serde_json::from_str(&text).unwrap();
    JSONSchema::options()
        .with_draft(Draft::Draft7)
        .compile(&value)
        .expect("schema compiles")
}

fn assert_valid(schema: &JSONSchema, doc: &Value) {
    if let Err(errors) = schema.validate(doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("schema violations:\n{}", msgs.join("\n"));
    }
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}\n{}", stdout(o)))
}

const WORKED: [&str; 7] = ["limit", "--num", "x^2+2*x*y-3*y^2", "--den", "x^3-y^3", "--at", "1,1"];

#[test]
fn worked_example() {
    let o = run(&WORKED);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("exists, = 4/3"), "{out}");
    assert!(out.contains("Theorem1"), "{out}");
    assert!(out.contains("agreement: Agree"), "{out}");
}

#[test]
fn nonexistence_example() {
    let o = run(&[
        "limit",
        "--num",
        "x^2+x*y+y^2",
        "--den",
        "x^2-x*y+y^2",
        "--at",
        "0,0",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["engine"]["verdict"]["result"]["kind"], "NotExists");
    assert_eq!(v["oracle"]["kind"]["kind"], "Disagree");
    assert_eq!(v["agreement"], "Agree");
}

#[test]
fn conflict_exits_2() {
    let o = run(&["limit", "--num", "3*x-6*y", "--den", "x-2*y+x^2", "--at", "0,0"]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    assert!(stdout(&o).contains("Conflict"));
}

#[test]
fn unsupported_exits_3() {
    let o = run(&["limit", "--num", "sin(1/x)", "--den", "x", "--at", "0,0"]);
    assert_eq!(code(&o), 3, "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn max_order_from_environment() {
    let args = [
        "limit",
        "--num",
        "x^2+x*y+y^2",
        "--den",
        "x^2-x*y+y^2",
        "--at",
        "0,0",
        "--no-oracle",
    ];
    let o = run_env(&args, &[("HOPITAL2D_MAX_ORDER", "1")]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    let o = run_env(&args, &[("HOPITAL2D_MAX_ORDER", "2")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    // the flag wins over the environment
    let mut with_flag = args.to_vec();
    with_flag.extend(["--max-order", "2"]);
    let o = run_env(&with_flag, &[("HOPITAL2D_MAX_ORDER", "1")]);
    assert_eq!(code(&o), 0);
    let o = run_env(&args, &[("HOPITAL2D_MAX_ORDER", "many")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn leading_minus_in_expressions() {
    let o = run(&["limit", "--num", "-x^2", "--den", "-y", "--at", "1,2", "--no-oracle"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("value 1/2"), "{}", stdout(&o));
}

#[test]
fn parse_errors_point_at_the_offset() {
    let o = run(&["limit", "--num", "x+*y", "--den", "x", "--at", "0,0"]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("x+*y") && err.contains("  ^"), "{err}");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&["limit", "--num", "x"])), 1);
    assert_eq!(code(&run(&["limit", "--bogus"])), 1);
    assert_eq!(code(&run(&["limit", "--num", "x", "--den", "y", "--at", "zero"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn generate_second_order() {
    let o = run(&[
        "generate",
        "--f",
        "x^2*y+x+y",
        "--g",
        "x^2*y^2+x*y",
        "--at",
        "1,1",
        "--k",
        "2",
        "--order",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("C1* = 1, C2* = 8, C3* = 2"), "{out}");
    assert!(out.contains("DegenerateDirection"), "{out}");
    assert!(out.contains("limit = 2"), "{out}");
}

#[test]
fn generate_rejects_bad_seeds() {
    let o = run(&["generate", "--f", "x", "--g", "x^2+y", "--at", "0,0", "--k", "1"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("cannot generate"));
    let o = run(&["generate", "--f", "x", "--g", "x+y", "--at", "0,0", "--k", "one"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn oracle_custom_curves_at_infinity() {
    let o = run(&[
        "oracle", "--num", "x^4+y^2", "--den", "x^2+y^4", "--at", "inf", "--curve", "1,1,1,4", "--curve", "1,2,1,1",
        "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    let estimates = v["oracle"]["estimates"].as_array().unwrap();
    assert_eq!(estimates[0]["kind"]["kind"], "Converged");
    assert!(estimates[0]["kind"]["value"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(estimates[1]["kind"]["kind"], "Diverged");
    assert_eq!(estimates[1]["kind"]["sign"], "+");
}

#[test]
fn oracle_marks_near_degenerate_lines() {
    let o = run(&[
        "oracle",
        "--num",
        "x^2*y+x^2+8*x*y-12*x+2*y^2-13*y+13",
        "--den",
        "x^2*y^2+x*y-3*x-3*y+4",
        "--at",
        "1,1",
        "--curves",
        "lines",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("near degenerate direction"), "{}", stdout(&o));
}

#[test]
fn reports_match_the_schema() {
    let schema = schema("report.schema.json");
    let cases: &[&[&str]] = &[
        &WORKED,
        &["limit", "--num", "x^2+x*y+y^2", "--den", "x^2-x*y+y^2", "--at", "0,0"],
        &["limit", "--num", "x^2+y^2", "--den", "sqrt(x^2+y^2+1)-1", "--at", "0,0"],
        &[
            "limit",
            "--num",
            "2*x^2+2*y^2+x+y",
            "--den",
            "3*x^2+3*y^2",
            "--at",
            "inf",
            "--curves",
            "lines",
        ],
        &[
            "limit",
            "--num",
            "x^2+y^2",
            "--den",
            "x^4+y^4",
            "--at",
            "0,0",
            "--no-oracle",
        ],
        &[
            "limit", "--num", "sin(1/x)", "--den", "x", "--at", "0,0", "--curves", "arcs",
        ],
        &[
            "limit",
            "--num",
            "x",
            "--den",
            "1/y",
            "--at",
            "0,0",
            "--product",
            "--no-oracle",
        ],
        &[
            "limit", "--num", "x+y", "--den", "x-y+1", "--at", "2,2", "--curves", "fuzz", "--seed", "3",
        ],
    ];
    for args in cases {
        let mut args = args.to_vec();
        args.push("--json");
        let o = run(&args);
        assert_valid(&schema, &json(&o));
    }
    let mut broken = json(&run(&[&WORKED[..], &["--json"]].concat()));
    broken["agreement"] = Value::from("Maybe");
    assert!(!schema.is_valid(&broken));
}

#[test]
fn generated_problems_match_the_schema() {
    let schema = schema("problem.schema.json");
    for order in ["1", "2"] {
        let o = run(&[
            "generate",
            "--f",
            "x^2*y+x+y",
            "--g",
            "x^2*y^2+x*y",
            "--at",
            "1,1",
            "--k",
            "2",
            "--order",
            order,
            "--json",
        ]);
        assert_eq!(code(&o), 0);
        assert_valid(&schema, &json(&o));
    }
}
