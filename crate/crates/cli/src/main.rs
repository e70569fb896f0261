//! `grhilbert`: metric queries, experiment suites and slice data for
//! convex domains in Grassmannian charts.
//!
//! Exit codes: 0 success, 2 point or domain error, 3 configuration error,
//! 4 suite invariant failed.

mod commands;
mod config;
mod failure;
mod output;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use grhilbert::domains::DomainDescriptor;
use serde_json::{json, Value};

use commands::{build_body, cmd_metric, cmd_plot_slice, parse_point, Outcome};
use config::RunConfig;
use failure::{config_err, Failure};

#[derive(Parser, Debug)]
#[command(name = "grhilbert", version, about = "Generalized Hilbert metric on convex domains in Grassmannian charts")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (written atomically); standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Multiplies every search budget.
    #[arg(long, global = true, default_value_t = 1.0)]
    budget_scale: f64,
    /// Multiplies every tolerance and suite threshold.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    /// Adds the elapsed wall-clock time to JSON reports (breaks byte identity).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate the metric between two points.
    Metric {
        /// Domain descriptor JSON (overrides the configured domain).
        #[arg(long)]
        domain: Option<String>,
        /// First point as a JSON array of rows.
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
    },
    /// Run an experiment suite.
    Suite {
        #[arg(value_enum)]
        name: SuiteName,
        #[arg(long)]
        domain: Option<String>,
    },
    /// Metric values on a planar grid through a centre point.
    PlotSlice {
        #[arg(long)]
        domain: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteName {
    Rproper,
    Extreme,
    Converge,
    Pnotq,
    Isometry,
}

impl SuiteName {
    fn as_str(self) -> &'static str {
        match self {
            SuiteName::Rproper => "rproper",
            SuiteName::Extreme => "extreme",
            SuiteName::Converge => "converge",
            SuiteName::Pnotq => "pnotq",
            SuiteName::Isometry => "isometry",
        }
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| config_err(format!("invalid {what}: {e}")))
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut config: RunConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
            parse_json(&text, "config")?
        }
        None => RunConfig::default(),
    };
    let domain = match &cli.command {
        Command::Metric { domain, x, y } => {
            if let Some(x) = x {
                config.x = Some(parse_json(x, "point x")?);
            }
            if let Some(y) = y {
                config.y = Some(parse_json(y, "point y")?);
            }
            domain
        }
        Command::Suite { domain, .. } | Command::PlotSlice { domain } => domain,
    };
    if let Some(d) = domain {
        config.domain = Some(parse_json::<DomainDescriptor>(d, "domain")?);
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let start = Instant::now();
    for (name, v) in [("budget-scale", cli.budget_scale), ("tol-scale", cli.tol_scale)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(config_err(format!("--{name} must be positive")));
        }
    }
    let config = load_config(cli)?;
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    let budget = config.budget.clone().scaled(cli.budget_scale);
    let tolerances = config.tolerances.scaled(cli.tol_scale);
    let (command, outcome, default_format): (&str, Outcome, Format) = match &cli.command {
        Command::Metric { .. } => {
            let body = build_body(config.domain.as_ref())?;
            let x = parse_point(config.x.as_ref(), "x", &body)?;
            let y = parse_point(config.y.as_ref(), "y", &body)?;
            ("metric", cmd_metric(&body, &x, &y, &budget.metric, seed)?, Format::Json)
        }
        Command::Suite { name, .. } => {
            let ctx = suites::SuiteContext { config: &config, budget: &budget, tolerances, tol_scale: cli.tol_scale, seed };
            (name.as_str(), suites::run(name.as_str(), &ctx)?, Format::Json)
        }
        Command::PlotSlice { .. } => {
            let body = build_body(config.domain.as_ref())?;
            let spec = config.slice.as_ref().ok_or_else(|| config_err("plot-slice needs a slice section"))?;
            ("plot-slice", cmd_plot_slice(&body, spec, &budget.metric, seed)?, Format::Csv)
        }
    };
    let ok = outcome.failed.is_none();
    let text = match cli.format.unwrap_or(default_format) {
        Format::Csv => outcome.csv.clone().unwrap_or_default(),
        Format::Json => {
            let mut report = json!({
                "tool": "grhilbert",
                "version": env!("CARGO_PKG_VERSION"),
                "command": command,
                "seed": seed,
                "budget_scale": cli.budget_scale,
                "tol_scale": cli.tol_scale,
                "config": serde_json::to_value(&config).expect("serializable"),
                "budgets": serde_json::to_value(&budget).expect("serializable"),
                "tolerances": serde_json::to_value(tolerances).expect("serializable"),
                "result": outcome.result,
                "ok": ok,
                "failed_invariant": outcome.failed.clone().map(Value::String).unwrap_or(Value::Null),
            });
            if cli.timing {
                report["wall_clock_s"] = json!(start.elapsed().as_secs_f64());
            }
            output::to_json_17(&report)
        }
    };
    if let Some(f) = &outcome.failed {
        eprintln!("suite failed: {f}");
    }
    Ok((text, ok))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((text, ok)) => {
            if let Err(e) = output::emit(cli.out.as_deref(), &text) {
                eprintln!("cannot write output: {e}");
                return ExitCode::from(3);
            }
            ExitCode::from(if ok { 0 } else { 4 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code() as u8)
        }
    }
}
