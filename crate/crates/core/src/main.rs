//! Experiment runner CLI: deterministic, configuration-driven runs with CSV
//! results. Exit codes: 0 all verdicts pass, 1 verdict failure,
//! 2 configuration error.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use uclab::lab::config::{ExperimentConfig, ExperimentKind};
use uclab::lab::runner::{run, RunOptions};
use uclab::LabError;

#[derive(Parser)]
#[command(
    name = "uclab",
    version,
    about = "Numerical laboratory for parabolic unique continuation on the torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for results.csv, meta.txt, and plots.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed override (takes precedence over the config's seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Also emit SVG plots derived from the CSV.
    #[arg(long)]
    plots: bool,
}

#[derive(Args)]
struct SelftestArgs {
    /// Optional configuration file; the self-test needs none.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Frequency traces over a coefficient-norm ensemble.
    Trace(CommonArgs),
    /// Vanishing-order estimators and the order bound.
    Vanish(CommonArgs),
    /// Pointwise-in-time observability (doubling) checks.
    Double(CommonArgs),
    /// Gaussian moments over balls and all of R^n.
    Moments(CommonArgs),
    /// Derived exponent sets over a sweep.
    Exponents(CommonArgs),
    /// Full invariant fixture suite.
    Selftest(SelftestArgs),
}

const SELFTEST_DEFAULT: &str = r#"
version = 1
kind = "selftest"

[grid]
n = 1
points = 64
"#;

fn load_config(
    path: &Path,
    expected: ExperimentKind,
) -> Result<(ExperimentConfig, Vec<u8>), LabError> {
    let bytes = std::fs::read(path)
        .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8_lossy(&bytes).into_owned();
    let cfg = ExperimentConfig::from_str(&text)?;
    if cfg.kind != expected {
        return Err(LabError::Config(format!(
            "field 'kind': config says '{}' but the subcommand is '{}'",
            cfg.kind.as_str(),
            expected.as_str()
        )));
    }
    Ok((cfg, bytes))
}

fn execute(
    cfg: &ExperimentConfig,
    bytes: &[u8],
    out: &Path,
    seed: Option<u64>,
    plots: bool,
) -> ExitCode {
    let opts = RunOptions {
        seed_override: seed,
        plots,
    };
    match run(cfg, bytes, out, &opts) {
        Ok(record) => {
            for v in &record.verdicts {
                println!(
                    "[{}] {}: {}",
                    if v.pass { "pass" } else { "FAIL" },
                    v.name,
                    v.detail
                );
            }
            println!(
                "{} rows -> {}; {} verdicts, {} failures ({:.2}s)",
                record.table.rows.len(),
                out.join("results.csv").display(),
                record.verdicts.len(),
                record.failures(),
                record.wall_seconds
            );
            if record.failures() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(LabError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(LabError::GateViolation(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("run failed: {e}");
            ExitCode::from(1)
        }
    }
}

fn config_failure(e: &LabError) -> ExitCode {
    match e {
        LabError::Config(_) => eprintln!("{e}"),
        other => eprintln!("configuration error: {other}"),
    }
    ExitCode::from(2)
}

fn dispatch(args: &CommonArgs, kind: ExperimentKind) -> ExitCode {
    match load_config(&args.config, kind) {
        Ok((cfg, bytes)) => execute(&cfg, &bytes, &args.out, args.seed, args.plots),
        Err(e) => config_failure(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Trace(a) => dispatch(a, ExperimentKind::Trace),
        Command::Vanish(a) => dispatch(a, ExperimentKind::Vanish),
        Command::Double(a) => dispatch(a, ExperimentKind::Double),
        Command::Moments(a) => dispatch(a, ExperimentKind::Moments),
        Command::Exponents(a) => dispatch(a, ExperimentKind::Exponents),
        Command::Selftest(a) => {
            let loaded = match &a.config {
                Some(path) => load_config(path, ExperimentKind::Selftest),
                None => ExperimentConfig::from_str(SELFTEST_DEFAULT)
                    .map(|cfg| (cfg, SELFTEST_DEFAULT.as_bytes().to_vec())),
            };
            match loaded {
                Ok((cfg, bytes)) => execute(&cfg, &bytes, &a.out, a.seed, a.plots),
                Err(e) => config_failure(&e),
            }
        }
    }
}
