use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod plot;

use commands::CliError;

#[derive(Parser)]
#[command(name = "alioth", version, about = "Singular tilt-angle analysis and leveling control workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Scenario JSON file. Without it the reference vehicle and default
    /// controller are used.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Override a config entry by dotted path, e.g. `controller.k_zeta=50`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Noise seed; for `ablation`, the only seed run.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Singular tilt angles, their rank checks and the leveling constraints.
    Stta(Common),
    /// Run one scenario and write the trajectory, metrics and plots.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Exit 0 even if the run diverges.
        #[arg(long)]
        allow_divergence: bool,
    },
    /// Run the scenario's parameter sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Worker count; defaults to the number of logical CPUs.
        #[arg(long, value_name = "N")]
        jobs: Option<usize>,
    },
    /// Paired runs with and without the Nussbaum gain.
    Ablation(Common),
    /// Structural and numerical invariant checks.
    Validate(Common),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Stta(c) => commands::stta(&c),
        Cmd::Simulate {
            common,
            allow_divergence,
        } => commands::simulate(&common, allow_divergence),
        Cmd::Sweep { common, jobs } => commands::sweep(&common, jobs),
        Cmd::Ablation(c) => commands::ablation(&c),
        Cmd::Validate(c) => commands::validate(&c),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ALIOTH_LOG", "warn"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
