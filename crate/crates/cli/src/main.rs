use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hopital2d::oracle::{CurveFamily, DEFAULT_TOL};
use hopital2d::report::{build_report, Mode, ReportConfig};
use hopital2d::{
    construct_order1, construct_order2, decide, parse, verify, Curve, EngineConfig, Expr, LimitPoint, Rational,
};

mod render;

const MAX_ORDER_ENV: &str = "HOPITAL2D_MAX_ORDER";

/// Lines within this angle (radians) of a degenerate direction are marked.
const NEAR_DEGENERATE_ANGLE: f64 = 0.1;

const EXIT_USAGE: u8 = 1;
const EXIT_GENERATOR: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "hopital2d", version, about = "Two-variable limits of indeterminate forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a limit and cross-check it numerically.
    Limit(LimitArgs),
    /// Build a problem with a prescribed limit from seed functions.
    Generate(GenerateArgs),
    /// Run only the numeric oracle and print the per-curve table.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Numerator (or first factor with --product).
    #[arg(long, allow_hyphen_values = true)]
    num: String,
    /// Denominator (or second factor with --product).
    #[arg(long, allow_hyphen_values = true)]
    den: String,
    /// Limit point "x0,y0"; coordinates are rationals, "inf", "+inf" or "-inf".
    #[arg(long, allow_hyphen_values = true)]
    at: String,
    /// Oracle tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Curve family for the oracle.
    #[arg(long, value_enum, default_value_t = FamilyName::Default)]
    curves: FamilyName,
    /// Seed for the fuzz family.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random curves in the fuzz family.
    #[arg(long, default_value_t = 16)]
    fuzz_count: usize,
    /// Emit JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyName {
    Default,
    Lines,
    Arcs,
    Fuzz,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Highest derivative order examined (default 4, or $HOPITAL2D_MAX_ORDER).
    #[arg(long)]
    max_order: Option<u32>,
    /// Skip the numeric cross-check.
    #[arg(long)]
    no_oracle: bool,
    /// Treat the input as the product num·den (a 0·∞ form).
    #[arg(long)]
    product: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Custom curve "ax,px,ay,py" for (x0 + ax·t^px, y0 + ay·t^py); repeatable.
    /// When given, replaces the family.
    #[arg(long = "curve", allow_hyphen_values = true)]
    curve: Vec<String>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Seed numerator f.
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    /// Seed denominator g.
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    /// Finite point "x0,y0".
    #[arg(long, allow_hyphen_values = true)]
    at: String,
    /// Target limit.
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    /// Order of the generated form.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
    order: u32,
    /// Emit JSON.
    #[arg(long)]
    json: bool,
}

/// A user-facing failure: message plus exit code.
struct Failure(u8, String);

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn parse_expr(flag: &str, text: &str) -> Result<Expr, Failure> {
    parse(text).map_err(|e| {
        let pointer = format!("{}^", " ".repeat(e.offset));
        usage(format!("--{flag}: {e}\n  {text}\n  {pointer}"))
    })
}

fn parse_point(text: &str) -> Result<LimitPoint, Failure> {
    text.parse::<LimitPoint>().map_err(|e| usage(format!("--at: {e}")))
}

fn family(input: &InputArgs) -> CurveFamily {
    match input.curves {
        FamilyName::Default => CurveFamily::Default,
        FamilyName::Lines => CurveFamily::Lines,
        FamilyName::Arcs => CurveFamily::Arcs,
        FamilyName::Fuzz => CurveFamily::Fuzz {
            seed: input.seed,
            count: input.fuzz_count,
        },
    }
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(usage(format!("--tol must be a positive number, got {tol}")))
    }
}

fn max_order(flag: Option<u32>) -> Result<u32, Failure> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(MAX_ORDER_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| usage(format!("{MAX_ORDER_ENV} must be a positive integer, got '{v}'")))?,
            Err(_) => 4,
        },
    };
    if n == 0 {
        return Err(usage("max order must be at least 1"));
    }
    Ok(n)
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn cmd_limit(args: LimitArgs) -> Result<u8, Failure> {
    let f = parse_expr("num", &args.input.num)?;
    let g = parse_expr("den", &args.input.den)?;
    let p = parse_point(&args.input.at)?;
    check_tol(args.input.tol)?;
    let fam = family(&args.input);
    let curves = fam.curves();
    let config = ReportConfig {
        max_order: max_order(args.max_order)?,
        tol: args.input.tol,
        curves: fam.name().to_string(),
        seed: matches!(fam, CurveFamily::Fuzz { .. }).then_some(args.input.seed),
        oracle: !args.no_oracle,
    };
    let mode = if args.product { Mode::Product } else { Mode::Quotient };
    let report = build_report(&f, &g, &p, mode, (!args.no_oracle).then_some(&curves[..]), config);
    if args.input.json {
        println!("{}", to_json(&report));
    } else {
        print!("{}", render::report(&report));
    }
    Ok(report.exit_code() as u8)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, Failure> {
    let f = parse_expr("num", &args.input.num)?;
    let g = parse_expr("den", &args.input.den)?;
    let p = parse_point(&args.input.at)?;
    check_tol(args.input.tol)?;
    let curves: Vec<Curve> = if args.curve.is_empty() {
        family(&args.input).curves()
    } else {
        args.curve
            .iter()
            .map(|c| c.parse::<Curve>().map_err(|e| usage(format!("--curve: {e}"))))
            .collect::<Result<_, _>>()?
    };
    let verdict = verify(&f, &g, &p, &curves, args.input.tol);
    // lines close to a direction where the denominator's leading term vanishes
    let slopes = decide(&f, &g, &p, &EngineConfig::default())
        .map(|v| v.degenerate_directions)
        .unwrap_or_default();
    let near: Vec<usize> = verdict
        .estimates
        .iter()
        .enumerate()
        .filter(|(_, e)| slopes.iter().any(|s| e.curve.near_slope(s.0, NEAR_DEGENERATE_ANGLE)))
        .map(|(i, _)| i)
        .collect();
    if args.input.json {
        let out = serde_json::json!({
            "oracle": verdict,
            "degenerate_slopes": slopes,
            "near_degenerate": near,
        });
        println!("{}", to_json(&out));
    } else {
        print!("{}", render::oracle_table(&verdict, &near));
    }
    Ok(0)
}

fn cmd_generate(args: GenerateArgs) -> Result<u8, Failure> {
    let f = parse_expr("f", &args.f)?;
    let g = parse_expr("g", &args.g)?;
    let p = parse_point(&args.at)?;
    let k: Rational = hopital2d::scalar::parse_rational(&args.k)
        .ok_or_else(|| usage(format!("--k: '{}' is not a rational number", args.k)))?;
    let built = match args.order {
        1 => construct_order1(&f, &g, &p, &k),
        _ => construct_order2(&f, &g, &p, &k),
    };
    let problem = built.map_err(|e| Failure(EXIT_GENERATOR, format!("cannot generate: {e}")))?;
    if args.json {
        println!("{}", to_json(&problem));
    } else {
        print!("{}", render::problem(&problem));
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Limit(a) => cmd_limit(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
