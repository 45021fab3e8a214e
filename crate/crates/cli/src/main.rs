//! `mnl`: command-line front end for the mixed norm laboratory.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mnl_core::inclusion::{check_witness_numerically, decide_inclusion, witness, Inclusion};
use mnl_core::means::best_mean_at;
use mnl_core::norm::{mixed_norm, NormCache, NormResult};
use mnl_core::verify::{CheckReport, Outcome, Verifier};
use mnl_core::{function::standard_battery, parse_function, AnalyticFunction, Error, ExtRational, SpaceParams};
use rayon::prelude::*;
use serde_json::{json, Value};

const EXIT_NOT_INCLUDED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_VERIFY_FAILED: u8 = 5;

#[derive(Parser)]
#[command(name = "mnl", version, about = "Integral means, mixed norms and inclusions of H(p,q,alpha) spaces")]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Target tolerance, in (0, 1e-2].
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed norm of a function in H(p,q,alpha).
    Norm {
        #[command(flatten)]
        f: FunctionArg,
        /// Space as p,q,alpha, e.g. 1,2,1 or inf,2,3/2.
        #[arg(long)]
        space: String,
    },
    /// Integral mean M_p(r, f).
    Mean {
        #[command(flatten)]
        f: FunctionArg,
        #[arg(long)]
        p: String,
        /// Radius r = 1 - 2^-k.
        #[arg(long, conflicts_with = "r")]
        k: Option<f64>,
        /// Radius in [0, 1).
        #[arg(long)]
        r: Option<f64>,
    },
    /// Decide whether H(src) is contained in H(dst).
    Include {
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
    },
    /// Witness of a non-inclusion, optionally checked numerically.
    Witness {
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        /// Also compute the witness norms in both spaces.
        #[arg(long)]
        check: bool,
    },
    /// Integral means along r = 1 - 2^-k as CSV.
    Sweep(SweepArgs),
    /// Run estimate checks whose names match a glob.
    Verify {
        #[arg(long, default_value = "*")]
        checks: String,
        /// File with one function per line; defaults to the standard battery.
        #[arg(long)]
        battery: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = VerifyFormat::Table)]
        format: VerifyFormat,
    },
}

#[derive(Args)]
struct FunctionArg {
    /// Function as shorthand (power:3/2, logpower:1,1, const:1, monomial:4,
    /// series:1,0.5i, lacunary:ones, kernel:re,im,s,e) or JSON.
    #[arg(long = "f")]
    spec: String,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    f: FunctionArg,
    #[arg(long)]
    p: String,
    /// Inclusive range of k, as a..b.
    #[arg(long, default_value = "1..20")]
    k: String,
    /// Samples per unit step of k.
    #[arg(long, default_value_t = 1)]
    per_step: u32,
    /// Emit (1-r)^alpha M_p instead of M_p and its error.
    #[arg(long, requires = "alpha")]
    weighted: bool,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    format: SweepFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyFormat {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
}

/// An error together with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ToleranceNotReached(_) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("mnl: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    if !(cli.tol > 0.0 && cli.tol <= 1e-2) {
        return Err(usage(format!("--tol must lie in (0, 1e-2], got {}", cli.tol)));
    }
    let (text, code) = match cli.command {
        Command::Norm { f, space } => cmd_norm(&f, &space, cli.tol)?,
        Command::Mean { f, p, k, r } => cmd_mean(&f, &p, k, r, cli.tol)?,
        Command::Include { src, dst } => cmd_include(&src, &dst)?,
        Command::Witness { src, dst, check } => cmd_witness(&src, &dst, check, cli.tol)?,
        Command::Sweep(args) => cmd_sweep(&args, cli.tol)?,
        Command::Verify { checks, battery, format } => cmd_verify(&checks, battery.as_ref(), format, cli.tol)?,
    };
    emit(cli.out.as_ref(), &text)?;
    Ok(code)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("MNL_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| usage(format!("MNL_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    let res = match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| usage(format!("cannot write output: {e}")))
}

fn parse_space(s: &str) -> Result<SpaceParams, Failure> {
    Ok(SpaceParams::parse(s)?)
}

fn parse_ext(s: &str) -> Result<ExtRational, Failure> {
    let p: ExtRational = s.parse()?;
    if !p.is_positive() {
        return Err(usage(format!("exponent must be positive, got {s}")));
    }
    Ok(p)
}

fn parse_f(f: &FunctionArg) -> Result<AnalyticFunction, Failure> {
    Ok(parse_function(&f.spec)?)
}

fn json_line(v: &Value) -> String {
    format!("{v}\n")
}

fn cmd_norm(f: &FunctionArg, space: &str, tol: f64) -> Result<(String, u8), Failure> {
    let f = parse_f(f)?;
    let s = parse_space(space)?;
    let res = mixed_norm(&f, &s, tol)?;
    let code = if matches!(res, NormResult::Inconclusive { .. }) { EXIT_INCONCLUSIVE } else { 0 };
    let mut v = serde_json::to_value(&res).map_err(|e| usage(e.to_string()))?;
    v["function"] = json!(f.label());
    v["space"] = json!(s.to_string());
    Ok((json_line(&v), code))
}

fn cmd_mean(f: &FunctionArg, p: &str, k: Option<f64>, r: Option<f64>, tol: f64) -> Result<(String, u8), Failure> {
    let f = parse_f(f)?;
    let p = parse_ext(p)?;
    let t = match (k, r) {
        (Some(k), None) if k >= 0.0 => 2f64.powf(-k),
        (None, Some(r)) if (0.0..1.0).contains(&r) => 1.0 - r,
        (None, None) => return Err(usage("give the radius with --r or --k")),
        _ => return Err(usage("radius must lie in [0, 1)")),
    };
    let m = best_mean_at(&f, &p, t, tol)?;
    let v = json!({"function": f.label(), "p": p.to_string(), "r": 1.0 - t, "value": m.value, "error": m.error});
    Ok((json_line(&v), 0))
}

fn cmd_include(src: &str, dst: &str) -> Result<(String, u8), Failure> {
    let (src, dst) = (parse_space(src)?, parse_space(dst)?);
    let verdict = decide_inclusion(&src, &dst)?;
    let mut v = serde_json::to_value(&verdict).map_err(|e| usage(e.to_string()))?;
    v["src"] = json!(src.to_string());
    v["dst"] = json!(dst.to_string());
    if let Some(w) = &verdict.witness {
        v["witness_spec"] = json!(w.label());
    }
    let code = if verdict.verdict == Inclusion::NotIncluded { EXIT_NOT_INCLUDED } else { 0 };
    Ok((json_line(&v), code))
}

fn cmd_witness(src: &str, dst: &str, check: bool, tol: f64) -> Result<(String, u8), Failure> {
    let (src, dst) = (parse_space(src)?, parse_space(dst)?);
    let verdict = decide_inclusion(&src, &dst)?;
    if verdict.is_included() {
        return Err(usage(format!("{src} is contained in {dst} ({}); there is no witness", verdict.branch)));
    }
    let w = witness(&src, &dst, verdict.branch)?;
    let mut v = json!({
        "src": src.to_string(),
        "dst": dst.to_string(),
        "branch": verdict.branch.as_str(),
        "witness_spec": w.label(),
        "witness": w.to_json()?,
        "src_membership": w.known_membership(&src),
        "dst_membership": w.known_membership(&dst),
    });
    let mut code = 0;
    if check {
        let wc = check_witness_numerically(&src, &dst, &w, tol, &NormCache::new());
        if !wc.passed {
            code = EXIT_INCONCLUSIVE;
        }
        v["numerical_check"] = serde_json::to_value(&wc).map_err(|e| usage(e.to_string()))?;
    }
    Ok((json_line(&v), code))
}

fn parse_k_range(s: &str) -> Result<(u32, u32), Failure> {
    let bad = || usage(format!("--k expects a range a..b with 0 <= a <= b <= 60, got '{s}'"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a > b || b > 60 {
        return Err(bad());
    }
    Ok((a, b))
}

fn cmd_sweep(args: &SweepArgs, tol: f64) -> Result<(String, u8), Failure> {
    let f = parse_f(&args.f)?;
    let p = parse_ext(&args.p)?;
    let (a, b) = parse_k_range(&args.k)?;
    if args.per_step == 0 {
        return Err(usage("--per-step must be positive"));
    }
    let alpha = match &args.alpha {
        Some(a) => Some(mnl_core::rational::to_f64(&mnl_core::rational::parse_rational(a)?)),
        None => None,
    };
    let steps = (b - a) * args.per_step;
    let ts: Vec<f64> = (0..=steps).map(|j| 2f64.powf(-(a as f64 + j as f64 / args.per_step as f64))).collect();
    let means: Vec<_> = ts.par_iter().map(|&t| best_mean_at(&f, &p, t, tol)).collect();
    let mut rows = Vec::with_capacity(ts.len());
    for (t, m) in ts.iter().zip(means) {
        rows.push((1.0 - t, *t, m?));
    }
    let text = match (args.format, args.weighted) {
        (SweepFormat::Csv, weighted) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| usage(e.to_string());
            if weighted {
                w.write_record(["r", "weighted_mean"]).map_err(csv_err)?;
            } else {
                w.write_record(["r", "mean", "error"]).map_err(csv_err)?;
            }
            for (r, t, m) in &rows {
                if weighted {
                    let wm = t.powf(alpha.unwrap_or(0.0)) * m.value;
                    w.write_record([fmt_f64(*r), fmt_f64(wm)]).map_err(csv_err)?;
                } else {
                    w.write_record([fmt_f64(*r), fmt_f64(m.value), fmt_f64(m.error)]).map_err(csv_err)?;
                }
            }
            String::from_utf8(w.into_inner().map_err(|e| usage(e.to_string()))?).map_err(|e| usage(e.to_string()))?
        }
        (SweepFormat::Json, weighted) => rows
            .iter()
            .map(|(r, t, m)| {
                if weighted {
                    json_line(&json!({"r": r, "weighted_mean": t.powf(alpha.unwrap_or(0.0)) * m.value}))
                } else {
                    json_line(&json!({"r": r, "mean": m.value, "error": m.error}))
                }
            })
            .collect(),
    };
    Ok((text, 0))
}

/// Shortest representation that parses back to the same `f64`.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn load_battery(path: Option<&PathBuf>) -> Result<Vec<AnalyticFunction>, Failure> {
    let Some(path) = path else { return Ok(standard_battery()) };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_function(l).map_err(Failure::from))
        .collect()
}

fn cmd_verify(pattern: &str, battery: Option<&PathBuf>, format: VerifyFormat, tol: f64) -> Result<(String, u8), Failure> {
    let battery = load_battery(battery)?;
    let verifier = Verifier::new(tol)?;
    let reports = verifier.run(pattern, &battery)?;
    let code = if reports.iter().any(CheckReport::is_unexpected_failure) { EXIT_VERIFY_FAILED } else { 0 };
    let text = match format {
        VerifyFormat::Json => reports
            .iter()
            .map(|r| serde_json::to_value(r).map(|v| json_line(&v)).map_err(|e| usage(e.to_string())))
            .collect::<Result<String, _>>()?,
        VerifyFormat::Table => table(&reports),
    };
    Ok((text, code))
}

fn table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.instance.len()).max().unwrap_or(8).max(8);
    let mut out = format!("{:<18}  {:<width$}  {:<13}  {:>12}  {:>9}\n", "check", "instance", "outcome", "violation", "tolerance");
    let (mut pass, mut fail, mut expected) = (0, 0, 0);
    for r in reports {
        let outcome = match &r.outcome {
            Outcome::Pass => {
                pass += 1;
                "pass"
            }
            Outcome::Fail => {
                fail += 1;
                "FAIL"
            }
            Outcome::ExpectedFail { .. } => {
                expected += 1;
                "expected-fail"
            }
        };
        out.push_str(&format!(
            "{:<18}  {:<width$}  {:<13}  {:>12.3e}  {:>9.1e}\n",
            r.name, r.instance, outcome, r.max_violation, r.tolerance
        ));
        if let Outcome::ExpectedFail { citation } = &r.outcome {
            out.push_str(&format!("{:<18}  note: {citation}\n", ""));
        }
        if let Some(err) = r.metadata.get("error") {
            out.push_str(&format!("{:<18}  error: {}\n", "", err.as_str().unwrap_or_default()));
        }
    }
    out.push_str(&format!("{} checks: {pass} pass, {expected} expected-fail, {fail} fail\n", reports.len()));
    out
}
