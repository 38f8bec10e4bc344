//! Command-line front end: `eval`, `check`, `learn` and `casestudy`.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::dynamics::{Guidance, Scenario};
use crate::experiments::{export_curves, run_casestudy, ExperimentPlan, ExperimentSummary};
use crate::formula::parse_formula;
use crate::lab::{format_table, run_all_checks, LabConfig};
use crate::pi2::{run_pi2, Pi2Config};
use crate::semantics::{robustness, MetricKind, NewMetric};
use crate::trace::{format_significant, Trace};

#[derive(Debug, Parser)]
#[command(name = "stlrob", version, about = "STL robustness under pluggable metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Robustness of a formula over a trace CSV.
    Eval {
        /// Inline formula; omit when using --file.
        formula: Option<String>,
        /// Read the formula from a file instead.
        #[arg(long, short = 'f', conflicts_with = "formula")]
        file: Option<PathBuf>,
        #[arg(long, short = 't')]
        trace: PathBuf,
        #[arg(long, default_value = "new")]
        metric: String,
        #[arg(long, default_value_t = NewMetric::DEFAULT_NU)]
        nu: f64,
        /// Evaluation time in seconds.
        #[arg(long, default_value_t = 0.0)]
        time: f64,
    },
    /// Property table for one or more conjunction operators.
    Check {
        #[arg(long, value_delimiter = ',', default_value = "trad,ag,new")]
        metric: Vec<String>,
        /// Sharpness for `new`; several values give one row each.
        #[arg(long, value_delimiter = ',', default_value = "3")]
        nu: Vec<f64>,
        #[arg(long, default_value_t = LabConfig::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Runs PI² from a TOML config and writes the learning history.
    Learn {
        config: PathBuf,
        /// Overrides `output` from the config.
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },
    /// Metric × guidance sweep of the two-goal case study.
    Casestudy {
        #[arg(long, value_delimiter = ',', default_value = "trad,ag,new")]
        metrics: Vec<String>,
        #[arg(long, default_value_t = NewMetric::DEFAULT_NU)]
        nu: f64,
        #[arg(long, value_delimiter = ',', default_value = "none,weak,strong")]
        guidance: Vec<String>,
        /// Number of seeds; runs use seeds `0..n`.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, default_value = "casestudy")]
        out: PathBuf,
    },
}

/// Layout of the `learn` config file.
///
/// ```toml
/// metric = "new"
/// nu = 3.0
/// guidance = "strong"        # or: scenario = "scenario.toml"
/// output = "history.csv"
///
/// [pi2]
/// iterations = 1000
/// noise_block = 50
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnConfig {
    pub metric: String,
    #[serde(default = "default_nu")]
    pub nu: f64,
    pub guidance: Option<String>,
    pub scenario: Option<PathBuf>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub pi2: Pi2Config,
}

fn default_nu() -> f64 {
    NewMetric::DEFAULT_NU
}

/// Parses arguments, runs the command and maps the outcome to an exit code:
/// 0 on success (or a satisfied formula), 1 for a violated formula, 2 on error.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Eval { formula, file, trace, metric, nu, time } => {
            let text = match (formula, file) {
                (Some(f), None) => f,
                (None, Some(path)) => {
                    fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?
                }
                _ => bail!("give a formula or --file"),
            };
            let (rho, report) = cmd_eval(&text, &trace, &parse_metric(&metric, nu)?, time)?;
            emit(&report)?;
            Ok(ExitCode::from(if rho >= 0.0 { 0 } else { 1 }))
        }
        Command::Check { metric, nu, seed, samples } => {
            let mut metrics = Vec::new();
            for name in &metric {
                if name.trim().eq_ignore_ascii_case("new") {
                    for v in &nu {
                        metrics.push(parse_metric(name, *v)?);
                    }
                } else {
                    metrics.push(parse_metric(name, NewMetric::DEFAULT_NU)?);
                }
            }
            emit(&cmd_check(&metrics, LabConfig { samples, seed })?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Learn { config, out } => {
            let path = cmd_learn(&config, out)?;
            emit(&format!("wrote {}\n", path.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Casestudy { metrics, nu, guidance, seeds, iterations, out } => {
            let metrics = metrics.iter().map(|m| parse_metric(m, nu)).collect::<Result<Vec<_>>>()?;
            let guidance =
                guidance.iter().map(|g| g.parse::<Guidance>().map_err(Into::into)).collect::<Result<Vec<_>>>()?;
            let mut plan = ExperimentPlan::new(metrics, guidance, (0..seeds).collect());
            if let Some(k) = iterations {
                plan.pi2.iterations = k;
            }
            let summary = cmd_casestudy(&plan, &out)?;
            emit(&format!("{}wrote {}\n", summary.format_table(), out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_metric(name: &str, nu: f64) -> Result<MetricKind> {
    MetricKind::parse(name, nu).with_context(|| format!("metric `{name}`"))
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Robustness and its per-node breakdown, as a value and a printable report.
pub fn cmd_eval(formula: &str, trace: &Path, metric: &MetricKind, time: f64) -> Result<(f64, String)> {
    let formula = parse_formula(formula.trim()).context("parsing formula")?;
    let trace = Trace::load(trace).with_context(|| format!("loading trace {}", trace.display()))?;
    let result = robustness(metric, &formula, &trace, time)?;
    let mut report = format!("rho = {}\n", format_significant(result.value, 6));
    for node in &result.nodes {
        let line = format!("{:>14}  {}{}", format_significant(node.value, 6), "  ".repeat(node.depth), node.formula);
        report.push_str(&line);
        report.push('\n');
    }
    Ok((result.value, report))
}

pub fn cmd_check(metrics: &[MetricKind], config: LabConfig) -> Result<String> {
    let mut reports = Vec::new();
    for m in metrics {
        reports.extend(run_all_checks(m, &config)?);
    }
    let mut out = format_table(&reports);
    for r in reports.iter().filter(|r| !r.passed) {
        out.push_str(&format!("{} {}: {}\n", r.metric, r.property.code(), r.detail));
    }
    Ok(out)
}

/// Runs the configured learning problem and writes its history CSV.
pub fn cmd_learn(config_path: &Path, out: Option<PathBuf>) -> Result<PathBuf> {
    let text = fs::read_to_string(config_path).with_context(|| format!("reading {}", config_path.display()))?;
    let config: LearnConfig = toml::from_str(&text).with_context(|| format!("parsing {}", config_path.display()))?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let metric = parse_metric(&config.metric, config.nu)?;
    let scenario = match (&config.guidance, &config.scenario) {
        (Some(g), None) => Scenario::case_study(g.parse()?),
        (None, Some(p)) => Scenario::load(base.join(p))?,
        (None, None) => Scenario::case_study(Guidance::Strong),
        (Some(_), Some(_)) => bail!("set either `guidance` or `scenario`, not both"),
    };
    let history = run_pi2(&config.pi2, &scenario, &metric, &scenario.formula)?;
    let path = out.or_else(|| config.output.map(|p| base.join(p))).unwrap_or_else(|| PathBuf::from("history.csv"));
    history.save(&path).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Writes `summary.csv`, `runs.csv` and `curves/<metric>_<guidance>.csv`.
pub fn cmd_casestudy(plan: &ExperimentPlan, out: &Path) -> Result<ExperimentSummary> {
    let summary = run_casestudy(plan)?;
    fs::create_dir_all(out)?;
    summary.write_csv(fs::File::create(out.join("summary.csv"))?)?;
    let mut w = csv::Writer::from_path(out.join("runs.csv"))?;
    w.write_record(["metric", "guidance", "seed", "success", "first_success", "final_rho", "final_cost"])?;
    for c in &summary.configs {
        for r in &c.runs {
            w.write_record([
                c.metric.to_string(),
                c.guidance.to_string(),
                r.seed.to_string(),
                r.success.to_string(),
                r.first_success.map_or_else(String::new, |k| k.to_string()),
                format_significant(r.final_rho, 9),
                format_significant(r.final_cost, 9),
            ])?;
        }
    }
    w.flush()?;
    export_curves(&summary, out.join("curves"))?;
    Ok(summary)
}

