//! `crosscov`: exact limit moments/cumulants of cross-covariance matrix
//! polynomials, Monte-Carlo verification against simulated ensembles, and
//! spectral exports.
//!
//! Exit codes: 0 success (all mc-verify rows pass), 1 a verification row
//! failed its z-threshold, 2 configuration or runtime error.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod fmt;

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(crosscov_core::Error),
    Lab(crosscov_lab::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Lab(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<crosscov_core::Error> for CliError {
    fn from(e: crosscov_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<crosscov_lab::Error> for CliError {
    fn from(e: crosscov_lab::Error) -> Self {
        CliError::Lab(e)
    }
}

#[derive(Parser)]
#[command(
    name = "crosscov",
    version,
    about = "Exact limit moments and Monte-Carlo verification for cross-covariance ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Key=value config file (keys: p, n1..n9, rho1..rho9, dist, seed,
    /// replicates, poly, regime, max_order, bins, out)
    #[arg(long)]
    config: PathBuf,

    /// Override a config entry, e.g. --set p=200 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct McVerifyArgs {
    #[command(flatten)]
    run: RunArgs,

    /// Maximum |z| before a row fails
    #[arg(long, default_value_t = 5.0)]
    z_threshold: f64,

    /// Finite-size bias numerator; the allowance is bias/p
    /// (defaults: 10 for RAW_C, 30 for CENTERED_E)
    #[arg(long)]
    bias: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print exact limit moments of the configured polynomial
    Moments(RunArgs),
    /// Print exact free cumulants of the configured polynomial variable
    Cumulants(RunArgs),
    /// Compare exact limits against Monte-Carlo trace moments
    McVerify(McVerifyArgs),
    /// Export a pooled eigenvalue histogram of a symmetric polynomial
    Esd(RunArgs),
    /// Export the complex eigenvalues of a centered-scaled matrix
    Scatter(RunArgs),
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Moments(args) => {
            let cfg = RunConfig::load(&args.config, &args.set)?;
            commands::run_moments(&cfg)?;
            Ok(true)
        }
        Command::Cumulants(args) => {
            let cfg = RunConfig::load(&args.config, &args.set)?;
            commands::run_cumulants(&cfg)?;
            Ok(true)
        }
        Command::McVerify(args) => {
            let cfg = RunConfig::load(&args.run.config, &args.run.set)?;
            commands::run_mc_verify(&cfg, args.z_threshold, args.bias)
        }
        Command::Esd(args) => {
            let cfg = RunConfig::load(&args.config, &args.set)?;
            commands::run_esd(&cfg)?;
            Ok(true)
        }
        Command::Scatter(args) => {
            let cfg = RunConfig::load(&args.config, &args.set)?;
            commands::run_scatter(&cfg)?;
            Ok(true)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
