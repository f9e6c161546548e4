//! Argument parsing, dispatch and report output.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use polymeasure::guard;

use crate::commands::{execute, Command, Ctx, Report};
use crate::error::CliError;
use crate::expr::Expr;
use crate::resolve;
use crate::workspace::Workspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// Finite-model checker for measurings between algebras of polynomial functors.
#[derive(Parser, Clone, Debug)]
#[command(name = "polymeasure", version)]
pub struct Cli {
    /// Workspace file with named definitions.
    #[arg(long, global = true)]
    pub workspace: Option<PathBuf>,
    /// Functor expression or workspace name used when objects need one.
    #[arg(long, global = true)]
    pub functor: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Bound on every enumerated set.
    #[arg(long, global = true, env = "POLYMEASURE_MAX_ELEMENTS")]
    pub max_elements: Option<usize>,
    /// Largest coalgebra whose subcoalgebras are enumerated.
    #[arg(long, global = true, env = "POLYMEASURE_MAX_SUBCOALGEBRA_CARRIER")]
    pub max_subcoalgebra_carrier: Option<usize>,
    /// Level budget of the measuring tensor.
    #[arg(long, global = true, env = "POLYMEASURE_TENSOR_BUDGET")]
    pub budget: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Exit status of a run, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Pass = 0,
    CheckFailed = 1,
    Error = 2,
}

fn load(path: &Option<PathBuf>) -> Result<Workspace, CliError> {
    match path {
        None => Ok(Workspace::default()),
        Some(p) => {
            let src = std::fs::read_to_string(p).map_err(|e| CliError::Io { path: p.display().to_string(), source: e })?;
            Workspace::parse(&src)
        }
    }
}

fn error_report(command: &str, e: &CliError) -> Value {
    let mut v = json!({"command": command, "passed": false, "error": e.to_string(), "summary": format!("error: {e}")});
    if let CliError::Parse { line, column, .. } = e {
        v["location"] = json!({"line": line, "column": column});
    }
    v
}

fn single(cli: &Cli, ws: &Workspace) -> Result<Report, CliError> {
    let functor = match &cli.functor {
        Some(s) => Some(resolve::functor(ws, &Expr::parse(s)?)?),
        None => None,
    };
    let cx = Ctx { ws, functor, budget: cli.budget.unwrap_or(guard::DEFAULT_TENSOR_BUDGET) };
    execute(&cli.command, &cx)
}

/// Runs the workspace command list; the worst status wins.
fn run_list(cli: &Cli, ws: &Workspace) -> (Value, Outcome) {
    let mut results = Vec::new();
    let mut worst = Outcome::Pass;
    for (line, text) in &ws.commands {
        let (value, outcome) = match shlex::split(text) {
            None => {
                let e = CliError::Parse { line: *line, column: 1, message: "unbalanced quotes".into() };
                (error_report(text, &e), Outcome::Error)
            }
            Some(words) => {
                let argv = std::iter::once("polymeasure".to_string()).chain(words);
                match Cli::try_parse_from(argv) {
                    Err(e) => {
                        let e = CliError::Usage(format!("line {line}: {}", e.render().to_string().trim().trim_start_matches("error: ")));
                        (error_report(text, &e), Outcome::Error)
                    }
                    Ok(inner) if matches!(inner.command, Command::Run) => {
                        let e = CliError::Usage(format!("line {line}: run cannot be nested"));
                        (error_report(text, &e), Outcome::Error)
                    }
                    Ok(mut inner) => {
                        inner.functor = inner.functor.or_else(|| cli.functor.clone());
                        inner.budget = inner.budget.or(cli.budget);
                        match single(&inner, ws) {
                            Ok(r) => {
                                let o = if r.passed { Outcome::Pass } else { Outcome::CheckFailed };
                                (r.value, o)
                            }
                            Err(e) => (error_report(inner.command.name(), &e), Outcome::Error),
                        }
                    }
                }
            }
        };
        worst = worst.max(outcome);
        results.push(json!({"line": line, "input": text, "report": value}));
    }
    let passed = worst == Outcome::Pass;
    let n = results.len();
    let failed = results.iter().filter(|r| r["report"]["passed"] != json!(true)).count();
    let summary = format!("{} of {n} commands passed", n - failed);
    (json!({"command": "run", "passed": passed, "results": results, "summary": summary}), worst)
}

fn render_text(v: &Value) -> String {
    let mut out = String::new();
    let status = if v["passed"] == json!(true) { "PASS" } else { "FAIL" };
    out.push_str(&format!("{} {}: {}\n", status, v["command"].as_str().unwrap_or("?"), v["summary"].as_str().unwrap_or("")));
    if let Some(results) = v["results"].as_array() {
        for r in results {
            for line in render_text(&r["report"]).lines() {
                out.push_str(&format!("  {line}\n"));
            }
        }
        return out;
    }
    if let Some(obj) = v.as_object() {
        for (k, val) in obj {
            if matches!(k.as_str(), "command" | "passed" | "summary") {
                continue;
            }
            out.push_str(&format!("  {k}: {val}\n"));
        }
    }
    out
}

/// Executes a parsed invocation and writes its report. Returns the exit code.
pub fn run(cli: &Cli) -> u8 {
    if let Some(n) = cli.max_elements {
        guard::set_max_elements(n);
    }
    if let Some(n) = cli.max_subcoalgebra_carrier {
        guard::set_max_subcoalgebra_carrier(n);
    }
    let name = cli.command.name();
    let (value, outcome) = match load(&cli.workspace) {
        Err(e) => (error_report(name, &e), Outcome::Error),
        Ok(ws) if matches!(cli.command, Command::Run) => run_list(cli, &ws),
        Ok(ws) => match single(cli, &ws) {
            Ok(r) => {
                let o = if r.passed { Outcome::Pass } else { Outcome::CheckFailed };
                (r.value, o)
            }
            Err(e) => (error_report(name, &e), Outcome::Error),
        },
    };
    if outcome == Outcome::Error {
        if let Some(msg) = value["error"].as_str() {
            eprintln!("error: {msg}");
        }
    }
    let text = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&value).expect("reports serialize")),
        Format::Text => render_text(&value),
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: {}: {e}", p.display());
                return Outcome::Error as u8;
            }
        }
        None => print!("{text}"),
    }
    outcome as u8
}
