use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use fraglab_core::Report;
use serde_json::Value;

use crate::commands::{self, COMMANDS, Outcome};
use crate::config::{ExperimentConfig, Params};
use crate::error::CliError;
use crate::exec::Parallel;
use crate::output::{Provenance, REPORT_FILE, RunReport, Section, to_value, write_atomic};

pub const DEFAULT_OUT: &str = "fraglab-out";

#[derive(Debug, Parser)]
#[command(
    name = "fraglab",
    version,
    about = "Seeded experiments on split-merge interval fragmentation"
)]
pub struct Cli {
    /// TOML file with `seed`, `out` and one table per subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; required by every stochastic subcommand.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for `report.json` and CSV files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the break-point recursion and export the last partition.
    Evolve(Params),
    /// Exact normalized break points and the representation identity.
    Alpha(Params),
    /// Empirical measure against its limit law.
    LimitTest(Params),
    /// Law of the chain hitting time.
    TauTest(Params),
    /// Generating-function recursion and its edge limits.
    Genfun(Params),
    /// Gamma setup: spacings, order statistics, fluctuations, uniform limit.
    GammaSetup(Params),
    /// Invariance of the two-sided gamma point process under the window chain.
    LineInvariance(Params),
    /// Local point process of the gamma setup against the stationary law.
    VagueConvergence(Params),
    /// Invariance of the origin chain.
    X1Invariance(Params),
    /// Foster-Lyapunov drift diagnostic of the window chain.
    Drift(Params),
    /// Every subcommand with defaults and config-file sections.
    All,
}

impl Command {
    fn split(&self) -> (&'static str, Option<&Params>) {
        match self {
            Command::Evolve(p) => ("evolve", Some(p)),
            Command::Alpha(p) => ("alpha", Some(p)),
            Command::LimitTest(p) => ("limit-test", Some(p)),
            Command::TauTest(p) => ("tau-test", Some(p)),
            Command::Genfun(p) => ("genfun", Some(p)),
            Command::GammaSetup(p) => ("gamma-setup", Some(p)),
            Command::LineInvariance(p) => ("line-invariance", Some(p)),
            Command::VagueConvergence(p) => ("vague-convergence", Some(p)),
            Command::X1Invariance(p) => ("x1-invariance", Some(p)),
            Command::Drift(p) => ("drift", Some(p)),
            Command::All => ("all", None),
        }
    }
}

/// Parses `argv`, runs the subcommand and returns the process exit code:
/// 0 when every check passes, 1 on a failed check or runtime error, 2 on a
/// configuration error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(pass) => i32::from(!pass),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command line; `Ok(pass)` once all reports are written.
pub fn execute(cli: &Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let seed = cli.seed.or(file.seed);
    let out = cli
        .out
        .clone()
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let exec = Parallel::from_env()?;
    match cli.command.split() {
        (name, Some(flags)) => {
            let (report, _) = run_one(name, flags, &file, seed, &exec, &out)?;
            Ok(report.pass)
        }
        (_, None) => run_all(&file, seed, &exec, &out),
    }
}

fn provenance(name: &str, flags: &Params, file: &ExperimentConfig, effective: Value) -> Result<Provenance, CliError> {
    Ok(Provenance {
        file: match file.section(name) {
            Some(p) => to_value(p)?,
            None => Value::Null,
        },
        cli: to_value(flags)?,
        effective,
    })
}

fn print_report(name: &str, report: &Report) {
    println!("== {name}");
    for c in &report.checks {
        println!("{c}");
    }
    for n in &report.notes {
        println!("note: {n}");
    }
}

fn run_one(
    name: &str,
    flags: &Params,
    file: &ExperimentConfig,
    seed: Option<u64>,
    exec: &Parallel,
    dir: &Path,
) -> Result<(RunReport, Outcome), CliError> {
    let params = flags.clone().or(file.section(name).cloned().unwrap_or_default());
    let mut outcome = commands::run(name, &params, seed, exec)?;
    print_report(name, &outcome.report);
    let mut names = Vec::new();
    for f in &outcome.files {
        write_atomic(dir, &f.name, &f.bytes)?;
        names.push(f.name.clone());
    }
    let effective = std::mem::take(&mut outcome.effective);
    let config = provenance(name, flags, file, effective)?;
    let report = RunReport::new(name, seed, config, outcome.report.clone(), names);
    write_atomic(dir, REPORT_FILE, &report.to_json()?)?;
    println!("{name}: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok((report, outcome))
}

fn run_all(file: &ExperimentConfig, seed: Option<u64>, exec: &Parallel, out: &Path) -> Result<bool, CliError> {
    let seed = Some(seed.ok_or_else(|| CliError::config("seed", "`all` runs stochastic subcommands; pass --seed"))?);
    let mut sections = Vec::new();
    for name in COMMANDS {
        let dir = out.join(name);
        let (report, _) = run_one(name, &Params::default(), file, seed, exec, &dir)?;
        sections.push(Section {
            subcommand: name.to_string(),
            pass: report.pass,
            effective: report.config.effective.clone(),
            checks: report.checks,
            notes: report.notes,
            outputs: report.outputs.iter().map(|o| format!("{name}/{o}")).collect(),
        });
    }
    let failed: Vec<&str> = sections
        .iter()
        .filter(|s| !s.pass)
        .map(|s| s.subcommand.as_str())
        .collect();
    let mut summary = Report::new();
    if !failed.is_empty() {
        summary.note(format!("failing subcommands: {}", failed.join(", ")));
    }
    let config = Provenance {
        file: to_value(file)?,
        cli: Value::Object(Default::default()),
        effective: Value::Null,
    };
    let mut report = RunReport::new("all", seed, config, summary, Vec::new());
    report.pass = failed.is_empty();
    report.sections = sections;
    write_atomic(out, REPORT_FILE, &report.to_json()?)?;
    println!("all: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(report.pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn subcommand_names_match() {
        let names: Vec<String> = Cli::command()
            .get_subcommands()
            .map(|c| c.get_name().to_string())
            .collect();
        for c in COMMANDS {
            assert!(names.iter().any(|n| n == c), "{c}");
        }
        assert!(names.iter().any(|n| n == "all"));
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "fraglab",
            "line-invariance",
            "--l",
            "-3",
            "--m",
            "2.5",
            "--steps",
            "1,10",
            "--seed",
            "4",
        ])
        .unwrap();
        let (name, p) = cli.command.split();
        assert_eq!(name, "line-invariance");
        let p = p.unwrap();
        assert_eq!(p.l, Some(-3.0));
        assert_eq!(p.steps, Some(vec![1, 10]));
        assert_eq!(cli.seed, Some(4));
        let cli = Cli::try_parse_from(["fraglab", "genfun", "--k-max", "5"]).unwrap();
        assert_eq!(cli.command.split().1.unwrap().k_max, Some(5));
    }

    #[test]
    fn bad_spec_is_usage_error() {
        assert_eq!(run(["fraglab", "evolve", "--boundary", "wobbly"]), 2);
        assert_eq!(run(["fraglab", "frobnicate"]), 2);
    }
}
