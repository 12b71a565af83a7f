//! Experiment runner for the `beurling` crate: one subcommand per experiment, each writing a CSV
//! or JSON report that embeds its resolved configuration.

pub mod commands;
pub mod oracle;
pub mod output;
pub mod params;
pub mod suite;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::Value;

use commands::*;
use output::{default_out_dir, RunError};

#[derive(Debug, Parser)]
#[command(name = "beurling", version, about = "Numerical experiments on weighted Fourier algebras")]
pub struct Cli {
    /// JSON config file `{"command": ..., "params": {...}, "out": ...}`; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (output directory for `all`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    LemmaTail(LemmaTail),
    NormCompare(NormCompare),
    ApproxUnit(ApproxUnit),
    Ditkin(Ditkin),
    IdealHull(IdealHull),
    Carleson(Carleson),
    Atw(Atw),
    BuildCarlesonSet(BuildCarlesonSet),
    GapSum(GapSum),
    InnerEval(InnerEval),
    ModelOp(ModelOp),
    Growth(Growth),
    Quotient(Quotient),
    InterpConst(InterpConst),
    /// Runs the acceptance suite.
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LemmaTail(_) => LemmaTail::NAME,
            Command::NormCompare(_) => NormCompare::NAME,
            Command::ApproxUnit(_) => ApproxUnit::NAME,
            Command::Ditkin(_) => Ditkin::NAME,
            Command::IdealHull(_) => IdealHull::NAME,
            Command::Carleson(_) => Carleson::NAME,
            Command::Atw(_) => Atw::NAME,
            Command::BuildCarlesonSet(_) => BuildCarlesonSet::NAME,
            Command::GapSum(_) => GapSum::NAME,
            Command::InnerEval(_) => InnerEval::NAME,
            Command::ModelOp(_) => ModelOp::NAME,
            Command::Growth(_) => Growth::NAME,
            Command::Quotient(_) => Quotient::NAME,
            Command::InterpConst(_) => InterpConst::NAME,
            Command::All => "all",
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<String>,
    params: Option<Value>,
    out: Option<PathBuf>,
}

fn read_config(path: &Path) -> Result<ConfigFile, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::config(format!("config: cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::config(format!("config: {e}")))
}

/// Outcome of one invocation: lines for standard output and the overall verdict.
pub struct Outcome {
    pub lines: Vec<String>,
    pub pass: bool,
}

pub fn run(cli: Cli) -> Result<Outcome, RunError> {
    let file = match &cli.config {
        Some(p) => read_config(p)?,
        None => ConfigFile::default(),
    };
    let name = cli.command.name();
    if let Some(c) = &file.command {
        if c != name {
            return Err(RunError::config(format!("command: config file is for `{c}`, not `{name}`")));
        }
    }
    let out = cli.out.clone().or(file.out.clone());
    let params = file.params;
    let report = match &cli.command {
        Command::LemmaTail(p) => execute(p, params)?,
        Command::NormCompare(p) => execute(p, params)?,
        Command::ApproxUnit(p) => execute(p, params)?,
        Command::Ditkin(p) => execute(p, params)?,
        Command::IdealHull(p) => execute(p, params)?,
        Command::Carleson(p) => execute(p, params)?,
        Command::Atw(p) => execute(p, params)?,
        Command::BuildCarlesonSet(p) => execute(p, params)?,
        Command::GapSum(p) => execute(p, params)?,
        Command::InnerEval(p) => execute(p, params)?,
        Command::ModelOp(p) => execute(p, params)?,
        Command::Growth(p) => execute(p, params)?,
        Command::Quotient(p) => execute(p, params)?,
        Command::InterpConst(p) => execute(p, params)?,
        Command::All => return run_suite(out, params),
    };
    let path = out.unwrap_or_else(|| default_out_dir().join(report.default_file_name()));
    report.write(&path)?;
    let status = if report.pass { "PASS" } else { "FAIL" };
    Ok(Outcome { lines: vec![format!("{status} {name}: {} -> {}", report.summary, path.display())], pass: report.pass })
}

fn run_suite(out: Option<PathBuf>, params: Option<Value>) -> Result<Outcome, RunError> {
    match params {
        None | Some(Value::Null) => {}
        Some(Value::Object(m)) if m.is_empty() => {}
        Some(_) => return Err(RunError::config("params: `all` takes no parameters")),
    }
    let dir = out.unwrap_or_else(default_out_dir);
    let start = Instant::now();
    let criteria = suite::run_all(|c| {
        eprintln!("criterion {:2} {} ({:.1} s)", c.id, if c.pass() { "PASS" } else { "FAIL" }, c.elapsed);
    })?;
    let total = start.elapsed().as_secs_f64();
    suite::write_all(&dir, &criteria, total)?;
    let mut lines: Vec<String> = criteria
        .iter()
        .map(|c| format!("{} {:2} {}: {}", if c.pass() { "PASS" } else { "FAIL" }, c.id, c.title, c.detail()))
        .collect();
    let pass = criteria.iter().all(suite::Criterion::pass);
    lines.push(format!("suite finished in {total:.1} s; reports in {}", dir.display()));
    Ok(Outcome { lines, pass })
}
