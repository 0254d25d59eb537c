use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sutherland_cli::commands;
use sutherland_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(name = "sutherland", version, about = "Hyperbolic C_n Sutherland experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; the built-in n = 2 default when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config time horizon.
    #[arg(long, allow_negative_numbers = true)]
    t_final: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the equations of motion and write the trajectory.
    Simulate(Common),
    /// Asymptotic data and phase shifts, closed form and fitted.
    Scatter(Common),
    /// Build the dual Lax matrix from `{lambda, theta, g, g2}`.
    Dual {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate every residual at the configured point.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Relative perturbation of ξ in the commutation check.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb_xi: f64,
    },
    /// Randomized determinant and eigen identity suites.
    #[command(hide = true)]
    Identities {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load(common: &Common) -> Result<sutherland_cli::Validated, CliError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(t) = common.t_final {
        cfg.t_final = t;
    }
    cfg.validate()
}

fn report(out: &Path, name: &str, passed: bool) -> bool {
    eprintln!("{}: {}", out.join(name).display(), if passed { "pass" } else { "FAIL" });
    passed
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Simulate(common) => {
            let s = commands::simulate(&load(&common)?, &common.out)?;
            Ok(report(
                &common.out,
                "summary.json",
                s.energy_drift <= s.energy_drift_bound * s.energy_initial.abs().max(1.0),
            ))
        }
        Command::Scatter(common) => {
            let r = commands::scatter(&load(&common)?, &common.out)?;
            Ok(report(&common.out, "scatter.json", r.passed))
        }
        Command::Dual { config, out } => {
            let r = commands::dual(&commands::DualInput::load(&config)?, &out)?;
            Ok(report(&out, "dual.json", r.passed))
        }
        Command::Verify { common, perturb_xi } => {
            let r = commands::verify(&load(&common)?, perturb_xi, &common.out)?;
            Ok(report(&common.out, "verify.json", r.passed))
        }
        Command::Identities { seed, sizes, instances, out } => {
            let r = commands::identities(seed, &sizes, instances, &out)?;
            Ok(report(&out, "identities.json", r.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
