//! Configuration-driven experiment runner for the variational toolkit.
//!
//! ```text
//! hardycrit <subcommand> --config <path> [--out <dir>] [--workers <n>]
//! ```
//!
//! Subcommands: verify-groundstate, hardy, thresholds, pohozaev-audit,
//! solve, multiplicity, concentration, hypotheses. Each writes
//! `summary.json` and `trace.csv` (plus optional `fields/*.json`) into the
//! output directory; identical configs produce byte-identical summaries
//! apart from the metadata block.
//!
//! Exit codes: 0 success, 2 config parse/validation error, 3 hypothesis
//! violated (or obstruction found), 4 non-convergence.

mod config;
mod experiments;
mod report;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("non-convergence: {0}")]
    NonConvergence(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::NonConvergence(_) => 4,
            CliError::Other(_) => 1,
        }
    }

    pub fn from_core(e: hardycrit::Error) -> CliError {
        use hardycrit::Error as E;
        match e {
            E::HypothesisViolated(_) | E::CouplingOutOfRange { .. } | E::ThetaOutOfRange { .. } => {
                CliError::Hypothesis(e.to_string())
            }
            E::InfeasibleInit(_) | E::TrustRegionViolation { .. } | E::LinearSolveFailure(_) => {
                CliError::NonConvergence(e.to_string())
            }
            E::InvalidParams(_)
            | E::InvalidRange { .. }
            | E::DimensionTooSmall { .. }
            | E::TooFewNodes { .. }
            | E::AngularOrderTooSmall { .. } => CliError::Config(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }

    pub fn from_io(e: std::io::Error) -> CliError {
        CliError::Other(format!("io error: {e}"))
    }
}

#[derive(Parser)]
#[command(
    name = "hardycrit",
    version,
    about = "Numerical toolkit for critical elliptic equations with Hardy potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the closed-form ground states: PDE residual and quotient identity
    VerifyGroundstate(RunArgs),
    /// Hardy-quotient floor audit over a coupling sweep
    Hardy(RunArgs),
    /// Compute every explicit Palais-Smale threshold
    Thresholds(RunArgs),
    /// Nonexistence audit: coupling bounds, Pohozaev sign test, I1 certificate
    PohozaevAudit(RunArgs),
    /// Nehari-constrained radial solve
    Solve(RunArgs),
    /// Localized solves at every peak with the separation audit
    Multiplicity(RunArgs),
    /// Concentration verification along a decreasing lambda sweep
    Concentration(RunArgs),
    /// Coefficient hypothesis checks and condition integrals
    Hypotheses(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Path to the TOML experiment configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config and HARDYCRIT_OUT)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweep points
    #[arg(long)]
    workers: Option<usize>,
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::VerifyGroundstate(_) => "verify-groundstate",
        Command::Hardy(_) => "hardy",
        Command::Thresholds(_) => "thresholds",
        Command::PohozaevAudit(_) => "pohozaev-audit",
        Command::Solve(_) => "solve",
        Command::Multiplicity(_) => "multiplicity",
        Command::Concentration(_) => "concentration",
        Command::Hypotheses(_) => "hypotheses",
    }
}

fn run(cmd: &Command) -> Result<(), CliError> {
    let name = subcommand_name(cmd);
    let args = match cmd {
        Command::VerifyGroundstate(a)
        | Command::Hardy(a)
        | Command::Thresholds(a)
        | Command::PohozaevAudit(a)
        | Command::Solve(a)
        | Command::Multiplicity(a)
        | Command::Concentration(a)
        | Command::Hypotheses(a) => a,
    };

    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| {
        // The TOML error display carries line/column information.
        CliError::Config(format!("{}: {e}", args.config.display()))
    })?;
    cfg.validate(name)
        .map_err(|e| CliError::Config(e.to_string()))?;

    if let Some(workers) = args.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Other(format!("worker pool: {e}")))?;
    }

    // Output directory precedence: --out flag, HARDYCRIT_OUT, config.
    let dir: PathBuf = args
        .out
        .clone()
        .or_else(|| std::env::var_os("HARDYCRIT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    std::fs::create_dir_all(&dir).map_err(CliError::from_io)?;

    let outcome = match cmd {
        Command::VerifyGroundstate(_) => experiments::verify_groundstate(&cfg, &dir)?,
        Command::Hardy(_) => experiments::hardy(&cfg, &dir)?,
        Command::Thresholds(_) => experiments::thresholds(&cfg, &dir)?,
        Command::PohozaevAudit(_) => experiments::pohozaev_audit(&cfg, &dir)?,
        Command::Solve(_) => experiments::solve(&cfg, &dir)?,
        Command::Multiplicity(_) => experiments::multiplicity(&cfg, &dir)?,
        Command::Concentration(_) => experiments::concentration(&cfg, &dir)?,
        Command::Hypotheses(_) => experiments::hypotheses(&cfg, &dir)?,
    };

    report::write_summary(&dir, outcome.report).map_err(CliError::from_io)?;

    if outcome.exit_hypothesis_violated {
        return Err(CliError::Hypothesis(format!(
            "`{name}` detected a violated hypothesis or obstruction; see summary.json"
        )));
    }
    if outcome.exit_non_convergence {
        return Err(CliError::NonConvergence(format!(
            "`{name}` did not meet its convergence criteria; see summary.json"
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
