mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use relfair_core::harness::generate::{random_problem, CoordRange};
use relfair_core::harness::{
    independence_rules, axiom_matrix, check_axiom, instance_rng, search_violation, AxiomId, Instance, MatrixCell, MatrixReport,
    SearchConfig, Status, CHARACTERIZING,
};
use relfair_core::oracle::{compare_oracle, GridSpec, OracleReport};
use relfair_core::rules::{equal_equivalent, RuleJson};
use relfair_core::{solve, Error, Point, Problem, Rat, Rule, Scalar};

/// Relative fair social choice workbench.
#[derive(Parser, Debug)]
#[command(name = "relfair", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Seed for instance generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Instances per axiom search.
    #[arg(long, global = true, default_value_t = 10_000)]
    budget: u64,
    /// Oracle grid spacing.
    #[arg(long, global = true, default_value = "1/16", value_parser = parse_rat)]
    grid: Rat,
    /// Bisection tolerance; `2^-k` is accepted.
    #[arg(long, global = true, default_value = "2^-30", value_parser = parse_rat)]
    tol: Rat,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one problem under one rule.
    Solve {
        /// Problem file, or inline JSON.
        problem: String,
        /// Rule file, or inline JSON.
        rule: String,
    },
    /// Search for axiom violations, or re-check a saved report.
    Axioms {
        /// Rule file, or inline JSON.
        rule: String,
        /// Comma-separated axiom names, `characterizing` or `all`.
        #[arg(long, default_value = "characterizing")]
        axioms: String,
        /// Number of individuals in generated instances.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Check this single instance (JSON) instead of searching.
        #[arg(long, conflicts_with = "replay")]
        instance: Option<String>,
        /// Re-check the witnesses of a saved JSON report.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// The example rules against the characterizing axioms.
    Matrix,
    /// Compare the exact solver with the grid oracle.
    Oracle {
        /// Rule file, or inline JSON.
        rule: String,
        /// Problem file or inline JSON; random problems when absent.
        #[arg(long)]
        problem: Option<String>,
        /// Number of random problems.
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Equal-equivalent of a point, by bisection.
    Eqeq {
        /// Rule file, or inline JSON.
        rule: String,
        /// Comma-separated rationals, e.g. `2,4`.
        point: String,
    },
    /// Draw a two-person problem and its choice set as SVG.
    Plot {
        /// Problem file, or inline JSON.
        problem: String,
        /// Rule file, or inline JSON.
        rule: String,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure { code: 2, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    if let Some(k) = s.trim().strip_prefix("2^") {
        let k: i32 = k.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        return Ok(Rat::from_integer(2).pow(k));
    }
    s.parse::<Rat>().map_err(|_| format!("{s:?} is not a rational number"))
}

/// Reads `arg` as inline JSON when it starts with `{`, else as a file path.
fn read_source(arg: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| input_error(format!("cannot read {arg}: {e}")))
}

fn load<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(&read_source(arg)?).map_err(|e| input_error(format!("invalid {what} {arg}: {e}")))
}

fn load_problem(arg: &str) -> Result<Problem, Failure> {
    load(arg, "problem")
}

fn load_rule(arg: &str) -> Result<Rule, Failure> {
    let j: RuleJson = load(arg, "rule")?;
    Ok(Rule::try_from(j)?)
}

fn parse_axioms(list: &str) -> Result<Vec<AxiomId>, Failure> {
    match list {
        "characterizing" => Ok(CHARACTERIZING.to_vec()),
        "all" => Ok(AxiomId::ALL.to_vec()),
        _ => list.split(',').map(|s| s.trim().parse::<AxiomId>().map_err(|_| input_error(format!("unknown axiom {s:?}")))).collect(),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Exit code for a set of verdicts: 1 on any violation, 3 when only inconclusive.
fn verdict_code(cells: &[MatrixCell]) -> u8 {
    if cells.iter().any(|c| c.verdict.status == Status::Violation) {
        1
    } else if cells.iter().any(|c| c.verdict.status == Status::Inconclusive) {
        3
    } else {
        0
    }
}

fn cells_text(cells: &[MatrixCell]) -> String {
    let mut out = String::new();
    for c in cells {
        let _ = writeln!(out, "{:<22} {:<12} {}", c.axiom.name(), c.verdict.status, c.verdict.note);
        if let Some(w) = &c.verdict.witness {
            let _ = writeln!(out, "  witness: {}", serde_json::to_string(w).expect("witness serializes"));
        }
    }
    out
}

struct Output {
    body: String,
    code: u8,
}

fn cmd_solve(format: Format, problem: &str, rule: &str) -> Result<Output, Failure> {
    let x = load_problem(problem)?;
    let rule = load_rule(rule)?;
    let s = solve(&rule, &x)?;
    let body = match format {
        Format::Json => {
            let pieces: Vec<_> = s
                .pieces()
                .iter()
                .zip(s.piece_vertices())
                .map(|(p, v)| json!({"constraints": p.constraints, "vertices": v}))
                .collect();
            to_json(&json!({
                "rule": RuleJson::from(rule.clone()),
                "problem": x,
                "ideal": s.ideal,
                "value": s.choice.value,
                "mode": s.choice.mode,
                "witnesses": s.choice.witnesses,
                "pieces": pieces,
            }))
        }
        _ => {
            let mut out = String::new();
            let _ = writeln!(out, "rule: {rule}");
            let _ = writeln!(out, "problem: {x}");
            let _ = writeln!(out, "ideal point: {}", s.ideal);
            let _ = writeln!(out, "value: {}", s.choice.value);
            let _ = writeln!(out, "mode: {}", if s.is_exact() { "exact" } else { "corner witnesses" });
            let ws: Vec<String> = s.choice.witnesses.iter().map(Point::to_string).collect();
            let _ = writeln!(out, "witnesses: {}", ws.join(" "));
            for (k, vs) in s.piece_vertices().iter().enumerate() {
                let vs: Vec<String> = vs.iter().map(Point::to_string).collect();
                let _ = writeln!(out, "piece {}: conv{{{}}}", k + 1, vs.join(", "));
            }
            out
        }
    };
    Ok(Output { body, code: 0 })
}

fn cmd_axioms(
    run: &RunConfig,
    format: Format,
    rule_arg: &str,
    axioms: &str,
    n: usize,
    instance: Option<&str>,
    replay: Option<&Path>,
) -> Result<Output, Failure> {
    let rule = load_rule(rule_arg)?;
    let name = rule.name().to_string();
    let report = if let Some(path) = replay {
        let saved: MatrixReport = load(&path.to_string_lossy(), "report")?;
        let mut cells = Vec::new();
        for c in saved.cells {
            let Some(w) = &c.verdict.witness else { continue };
            let verdict = check_axiom(&rule, c.axiom, &w.instance)?;
            cells.push(MatrixCell { rule: name.clone(), axiom: c.axiom, verdict });
        }
        MatrixReport { seed: saved.seed, budget: saved.budget, cells }
    } else if let Some(inst) = instance {
        let axioms = parse_axioms(axioms)?;
        let inst: Instance = load(inst, "instance")?;
        let cells = axioms
            .iter()
            .map(|&a| Ok(MatrixCell { rule: name.clone(), axiom: a, verdict: check_axiom(&rule, a, &inst)? }))
            .collect::<Result<Vec<_>, Failure>>()?;
        MatrixReport { seed: run.seed, budget: 1, cells }
    } else {
        let axioms = parse_axioms(axioms)?;
        let cfg = SearchConfig { budget: run.budget, seed: run.seed, n, ..SearchConfig::default() };
        let cells = axioms
            .iter()
            .map(|&a| Ok(MatrixCell { rule: name.clone(), axiom: a, verdict: search_violation(&rule, a, &cfg)? }))
            .collect::<Result<Vec<_>, Failure>>()?;
        MatrixReport { seed: run.seed, budget: run.budget, cells }
    };
    let code = verdict_code(&report.cells);
    let body = match format {
        Format::Json => to_json(&report),
        _ => format!("rule: {rule}\n{}", cells_text(&report.cells)),
    };
    Ok(Output { body, code })
}

/// Whether every example rule violates exactly its designated axiom.
fn matrix_matches(report: &MatrixReport) -> bool {
    independence_rules().iter().all(|(name, _, designated)| {
        CHARACTERIZING.iter().all(|&a| {
            let Some(c) = report.cell(name, a) else { return false };
            (c.verdict.status == Status::Violation) == (a == *designated)
        })
    })
}

fn cmd_matrix(run: &RunConfig, format: Format) -> Result<Output, Failure> {
    let rules: Vec<(String, Rule)> = independence_rules().into_iter().map(|(n, r, _)| (n, r)).collect();
    let cfg = SearchConfig { budget: run.budget, seed: run.seed, ..SearchConfig::default() };
    let report = axiom_matrix(&rules, &CHARACTERIZING, &cfg)?;
    let ok = matrix_matches(&report);
    let body = match format {
        Format::Json => to_json(&report),
        _ => {
            let mut out = report.to_table();
            out.push('\n');
            for c in report.cells.iter().filter(|c| c.verdict.status != Status::Pass) {
                let _ = writeln!(out, "{} / {}: {}", c.rule, c.axiom.name(), c.verdict.note);
            }
            let _ = writeln!(out, "independence assignment {}", if ok { "reproduced" } else { "NOT reproduced" });
            out
        }
    };
    Ok(Output { body, code: if ok { 0 } else { 1 } })
}

/// Agreement for corner-attained rules; otherwise the gap must respect the
/// Lipschitz bound and the exact value must dominate.
fn oracle_ok(r: &OracleReport) -> bool {
    r.agrees() || (r.exact_at_least_oracle && r.argmax_nonmembers.is_empty() && r.bound.as_ref().is_some_and(|b| r.gap <= Scalar::Exact(b.clone())))
}

fn cmd_oracle(run: &RunConfig, format: Format, rule: &str, problem: Option<&str>, count: u64, n: usize) -> Result<Output, Failure> {
    let rule = load_rule(rule)?;
    let grid = GridSpec::new(run.grid.clone())?;
    let problems: Vec<Problem> = match problem {
        Some(p) => vec![load_problem(p)?],
        None => (0..count)
            .map(|k| random_problem(n, 3, &CoordRange::default(), &mut instance_rng(run.seed, k)))
            .collect::<Result<_, _>>()?,
    };
    let mut entries = Vec::with_capacity(problems.len());
    let mut ok = true;
    let mut text = String::new();
    for x in &problems {
        let r = compare_oracle(&rule, x, &grid)?;
        let good = oracle_ok(&r);
        ok &= good;
        let _ = writeln!(
            text,
            "{x}: exact {} oracle {} gap {}{} {}",
            r.exact_value,
            r.oracle_value,
            r.gap,
            r.bound.as_ref().map(|b| format!(" (bound {b})")).unwrap_or_default(),
            if good { "ok" } else { "MISMATCH" }
        );
        entries.push(json!({"problem": x, "report": r}));
    }
    let body = match format {
        Format::Json => to_json(&json!({"rule": RuleJson::from(rule.clone()), "h": run.grid, "seed": run.seed, "results": entries})),
        _ => format!("rule: {rule}\ngrid h: {}\n{text}", run.grid),
    };
    Ok(Output { body, code: if ok { 0 } else { 1 } })
}

fn cmd_eqeq(run: &RunConfig, format: Format, rule: &str, point: &str) -> Result<Output, Failure> {
    let rule = load_rule(rule)?;
    let x = Point::parse(point)?;
    let w = equal_equivalent(&rule, &x, &run.tol)?;
    let body = match format {
        Format::Json => to_json(&json!({"rule": RuleJson::from(rule.clone()), "point": x, "tol": run.tol, "value": w})),
        _ => format!("W{x} = {w} (~{:.9}, tol {})\n", w.to_f64(), run.tol),
    };
    Ok(Output { body, code: 0 })
}

fn cmd_plot(problem: &str, rule: &str) -> Result<Output, Failure> {
    let x = load_problem(problem)?;
    if x.n() != 2 {
        return Err(input_error(format!("plot needs exactly 2 individuals, got {}", x.n())));
    }
    let rule = load_rule(rule)?;
    let s = solve(&rule, &x)?;
    Ok(Output { body: svg::render(&s)?, code: 0 })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let run = &cli.run;
    let format = match (&cli.command, run.format) {
        (Command::Plot { .. }, None | Some(Format::Svg)) => Format::Svg,
        (Command::Plot { .. }, Some(f)) => return Err(input_error(format!("plot writes svg, not {f:?}"))),
        (_, Some(Format::Svg)) => return Err(input_error("svg output is only available for plot")),
        (_, f) => f.unwrap_or(Format::Text),
    };
    match &cli.command {
        Command::Solve { problem, rule } => cmd_solve(format, problem, rule),
        Command::Axioms { rule, axioms, n, instance, replay } => {
            cmd_axioms(run, format, rule, axioms, *n, instance.as_deref(), replay.as_deref())
        }
        Command::Matrix => cmd_matrix(run, format),
        Command::Oracle { rule, problem, count, n } => cmd_oracle(run, format, rule, problem.as_deref(), *count, *n),
        Command::Eqeq { rule, point } => cmd_eqeq(run, format, rule, point),
        Command::Plot { problem, rule } => cmd_plot(problem, rule),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.run.out {
                Some(path) => std::fs::write(path, &out.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{}", out.body);
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(out.code),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_and_powers_parse() {
        assert_eq!(parse_rat("1/16").unwrap(), Rat::new(1, 16));
        assert_eq!(parse_rat("2^-3").unwrap(), Rat::new(1, 8));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn axiom_lists() {
        assert_eq!(parse_axioms("characterizing").ok().unwrap().len(), 7);
        assert_eq!(parse_axioms("hammond_eai, continuity").ok().unwrap(), vec![AxiomId::HammondEai, AxiomId::Continuity]);
        assert!(parse_axioms("fairness").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
