use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use objectiva::{ComplexMatrix, Mutation, Verifier};
use objectiva_cli::{battery, scenarios, validate_matrix, BatteryOptions, OperatorKind, ScenarioConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_UNREADABLE: u8 = 2;

#[derive(Parser)]
#[command(name = "objectiva", version, about = "Effect-algebra scenarios and verification battery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Override the seed of the config or battery.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the numerical tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Run every verifier and oracle in object dimensions 2 to 8.
    VerifyAll {
        /// Inject a mutation hook; the battery should then fail.
        #[arg(long, value_parser = parse_mutation)]
        mutate: Option<Mutation>,
        /// Random cases per dimension and check.
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Emit sampled events of a scenario as JSON lines.
    Sample {
        config: PathBuf,
        /// Override the number of trials.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Check a matrix file against the state and effect invariants.
    Validate {
        matrix: PathBuf,
        #[arg(long = "as", value_enum, default_value_t = OperatorKind::Any)]
        kind: OperatorKind,
    },
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    s.parse().map_err(|e: objectiva::Error| e.to_string())
}

enum Failure {
    Unreadable(anyhow::Error),
    Other(anyhow::Error),
}

fn unreadable(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Unreadable(e.into())
}

fn other(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Other(e.into())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(other),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout").map_err(other),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn load_config(path: &Path, common: &Common) -> Result<ScenarioConfig, Failure> {
    let mut config = ScenarioConfig::load(path).map_err(unreadable)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(tol) = common.tolerance {
        config.tolerance = tol;
    }
    config.validate().map_err(unreadable)?;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    let common = &cli.common;
    let out = common.out.as_deref();
    match &cli.command {
        Command::Run { config } => {
            let config = load_config(config, common)?;
            let verifier = Verifier::with_tolerance(config.tolerance);
            let report = scenarios::run(&config, &verifier).map_err(other)?;
            let text = match common.format {
                Format::Json => to_json(&report),
                Format::Text => scenarios::render_text(&report),
            };
            emit(out, &text)?;
            Ok(report.pass)
        }
        Command::VerifyAll { mutate, cases } => {
            let mut options = BatteryOptions::default();
            options.seed = common.seed.unwrap_or(options.seed);
            options.tolerance = common.tolerance.unwrap_or(options.tolerance);
            options.cases_per_dim = cases.unwrap_or(options.cases_per_dim);
            let report = battery::verify_all(&options, *mutate);
            let text = match common.format {
                Format::Json => to_json(&report),
                Format::Text => battery::render_text(&report),
            };
            emit(out, &text)?;
            Ok(report.pass)
        }
        Command::Sample { config, trials } => {
            let mut config = load_config(config, common)?;
            config.trials = trials.unwrap_or(config.trials);
            let verifier = Verifier::with_tolerance(config.tolerance);
            let records = scenarios::sample(&config, &verifier).map_err(other)?;
            let mut text = String::new();
            for r in &records {
                text += &serde_json::to_string(r).expect("records serialize");
                text.push('\n');
            }
            emit(out, &text)?;
            Ok(true)
        }
        Command::Validate { matrix, kind } => {
            let raw = std::fs::read_to_string(matrix)
                .with_context(|| format!("cannot read {}", matrix.display()))
                .map_err(unreadable)?;
            let m: ComplexMatrix = serde_json::from_str(&raw).context("cannot parse matrix").map_err(unreadable)?;
            let tol = common.tolerance.unwrap_or(objectiva::DEFAULT_TOLERANCE);
            let report = validate_matrix(&m, tol, *kind);
            let text = match common.format {
                Format::Json => to_json(&report),
                Format::Text => format!(
                    "{} dim {}: state {}, effect {}\n",
                    if report.pass { "PASS" } else { "FAIL" },
                    report.dim,
                    report.state.error.as_deref().unwrap_or("ok"),
                    report.effect.error.as_deref().unwrap_or("ok"),
                ),
            };
            emit(out, &text)?;
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(Failure::Unreadable(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_UNREADABLE)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
