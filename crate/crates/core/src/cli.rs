//! `qdc` command-line front end. [`run`] is the whole program minus the
//! process boundary, so tests can drive it in-process.

use std::ffi::OsString;
use std::io::Write;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::battery::{aggregate, report, run_suite, RunOptions, Status, Suite};
use crate::error::{QdcError, Result};
use crate::expr::ExprParser;
use crate::presentations::{defined_symbols, presentation, Mutation, PresentationName};
use crate::rewrite::Strategy;
use crate::rmatrix::{build_rhat, Convention};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SKIP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qdc", version, about = "Exact verification of quantum-group differential calculi")]
struct Cli {
    /// R-matrix convention.
    #[arg(long, global = true, env = "QDC_CONVENTION", default_value = "standard")]
    convention: Convention,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run a suite of checks and print a report.
    Check(CheckArgs),
    /// Print the normal form of an expression.
    Reduce(ReduceArgs),
    /// Print the R-matrix, a presentation, or its rules as JSON.
    Dump(DumpArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    n: usize,
    /// all, matrix, swz, lbasis or fp-embed.
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Reduce with a shuffled redex order seeded by this value.
    #[arg(long)]
    seed: Option<u64>,
    /// Word length for the overlap check.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..=6))]
    max_degree: u64,
    /// Wall-clock budget, e.g. 500ms, 10s, 2m.
    #[arg(long, value_parser = humantime::parse_duration)]
    budget: Option<Duration>,
    /// Run omega_x_relation, w_relations, ww_relation and wwbar_identity above N = 2.
    #[arg(long)]
    heavy: bool,
    /// Include elapsed milliseconds per check.
    #[arg(long)]
    timings: bool,
    /// Negative control: kappa, rhat, projector, ss4-constant or qtrace-weights.
    #[arg(long)]
    mutation: Option<Mutation>,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long)]
    n: usize,
    /// frt_T, swz, lbasis or fp.
    #[arg(long)]
    presentation: PresentationName,
    #[arg(long)]
    seed: Option<u64>,
    expr: String,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["rmatrix", "presentation"]))]
struct DumpArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    rmatrix: bool,
    #[arg(long)]
    presentation: Option<PresentationName>,
    /// With --presentation: dump the oriented rules instead.
    #[arg(long, requires = "presentation", conflicts_with = "rmatrix")]
    rules: bool,
}

fn strategy(seed: Option<u64>) -> Strategy {
    seed.map_or(Strategy::Insertion, Strategy::Shuffled)
}

/// Run `qdc` with `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let res = match cli.cmd {
        Cmd::Check(a) => cmd_check(cli.convention, a, out),
        Cmd::Reduce(a) => cmd_reduce(cli.convention, a, out),
        Cmd::Dump(a) => cmd_dump(cli.convention, a, out).map(|_| EXIT_PASS),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                QdcError::BudgetExceeded => EXIT_SKIP,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn io(e: std::io::Error) -> QdcError {
    QdcError::Consistency(format!("output: {e}"))
}

fn cmd_check(convention: Convention, a: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    if a.n == 0 {
        return Err(QdcError::InvalidDimension(0));
    }
    let opts = RunOptions {
        convention,
        mutation: a.mutation,
        strategy: strategy(a.seed),
        budget: a.budget,
        heavy: a.heavy,
        timings: a.timings,
        max_degree: a.max_degree as usize,
    };
    let results = run_suite(a.suite, a.n, &opts);
    let rep = report(a.suite, a.n, &opts, &results);
    match a.format {
        Format::Json => {
            let v = serde_json::to_value(&rep).map_err(|e| QdcError::Consistency(e.to_string()))?;
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).map_err(io)?;
        }
        Format::Text => {
            let mut head = format!("suite {} N={} convention {}", rep.suite, rep.n, rep.convention);
            if let Some(m) = rep.mutation {
                head.push_str(&format!(" mutation {m}"));
            }
            writeln!(out, "{head}").map_err(io)?;
            for r in &results {
                let status = format!("{:?}", r.status).to_uppercase();
                let mut line = format!("  {:<20} {:<4}", r.name, status);
                if let Some(ms) = r.millis {
                    line.push_str(&format!(" {ms:>7} ms"));
                }
                if let Some(c) = &r.component {
                    line.push_str(&format!("  at {c}"));
                }
                if let Some(w) = &r.witness {
                    line.push_str(&format!("  witness {w}"));
                }
                if let Some(why) = &r.reason {
                    line.push_str(&format!("  ({why})"));
                }
                writeln!(out, "{}", line.trim_end()).map_err(io)?;
            }
            writeln!(out, "{}", format!("{:?}", rep.status).to_uppercase()).map_err(io)?;
        }
    }
    Ok(match aggregate(&results) {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Skip => EXIT_SKIP,
    })
}

fn cmd_reduce(convention: Convention, a: ReduceArgs, out: &mut dyn Write) -> Result<i32> {
    let parser = ExprParser::new(a.n, convention)?;
    let p = parser.parse(&a.expr)?;
    let pres = presentation(a.presentation, a.n, convention)?;
    let nf = pres.rules.reduce_with(&p, strategy(a.seed))?;
    writeln!(out, "{}", nf.to_expr_string()).map_err(io)?;
    Ok(EXIT_PASS)
}

/// JSON value for a dump target; keys come out sorted.
fn dump_value(convention: Convention, a: &DumpArgs) -> Result<Value> {
    if a.rmatrix {
        let r = build_rhat(a.n, convention)?;
        let entries: Vec<Value> = r.entry_list().into_iter().map(|(i, j, k, l, s)| json!([i, j, k, l, s])).collect();
        return Ok(json!({ "N": a.n, "convention": convention.as_str(), "entries": entries }));
    }
    let name = a.presentation.expect("clap enforces a target");
    let pres = presentation(name, a.n, convention)?;
    if a.rules {
        return serde_json::to_value(pres.rules.records()).map_err(|e| QdcError::Consistency(e.to_string()));
    }
    let families: Vec<Value> = pres
        .families
        .iter()
        .map(|f| json!({ "id": f.id, "components": f.components.iter().map(|c| c.to_expr_string()).collect::<Vec<_>>() }))
        .collect();
    let eliminated: Vec<Value> = pres
        .eliminated
        .iter()
        .map(|(g, img)| json!({ "generator": g.to_string(), "image": img.to_expr_string(), "source": "eq-isa1-trace" }))
        .collect();
    let mut v = json!({
        "name": name.as_str(),
        "N": a.n,
        "convention": convention.as_str(),
        "generators": pres.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "eliminated": eliminated,
        "families": families,
        "rule_count": pres.rules.len(),
    });
    if name != PresentationName::FrtT {
        let sym = defined_symbols(&pres.ctx)?;
        v["symbols"] = json!({
            "DetT": sym.det_t.to_expr_string(),
            "TrOmL": sym.tr_om_l.to_expr_string(),
            "XiX": sym.xi_x.to_expr_string(),
        });
    } else {
        v["symbols"] =
            json!({ "DetT": defined_symbols(&pres.ctx).map(|s| s.det_t.to_expr_string()).unwrap_or_default() });
    }
    Ok(v)
}

fn cmd_dump(convention: Convention, a: DumpArgs, out: &mut dyn Write) -> Result<()> {
    let v = dump_value(convention, &a)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qdc(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("qdc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(qdc(&["check", "--n", "2", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(qdc(&["check", "--n", "2", "--suite", "nope"]).0, EXIT_USAGE);
        assert_eq!(qdc(&["dump", "--n", "2"]).0, EXIT_USAGE);
    }

    #[test]
    fn reduce_parse_error_is_usage_error() {
        let (code, _, err) = qdc(&["reduce", "--n", "2", "--presentation", "swz", "T[0,1]"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("out of range"), "{err}");
    }

    #[test]
    fn reduce_normal_word_is_unchanged() {
        let (code, out, _) = qdc(&["reduce", "--n", "2", "--presentation", "frt_T", "T[1,1]"]);
        assert_eq!((code, out.trim()), (0, "T[1,1]"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = qdc(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("check") && out.contains("QDC_CONVENTION"));
    }
}
