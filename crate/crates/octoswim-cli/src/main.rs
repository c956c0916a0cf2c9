//! `octoswim` — command-line front end for the swimming-robot toolkit.
//!
//! Subcommands map one-to-one onto the library's entry points:
//!
//! - `design`: synthesize crank-slider dimensions for a target travel
//!   ratio, or list the catalogued builds.
//! - `mech`: tabulate slider kinematics over one crank revolution.
//! - `arm`: run the single-arm bench rig and score recurve shapes.
//! - `swim`: simulate straight vertical swimming.
//! - `steer`: simulate planar swimming with independent motor speeds.
//! - `sweep`: run a grid of swim scenarios (presets x depths x rpms).
//!
//! Every run is deterministic; repeating a command reproduces its output
//! files byte for byte. Exit codes: 0 success, 1 runtime failure
//! (e.g. a diverging integration), 2 usage or configuration error.

mod commands;
mod config;
mod csvfmt;

use std::fmt;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use octoswim::{ArmError, MechanismError, VehicleError};

#[derive(Parser)]
#[command(name = "octoswim", version, about = "Design and simulation tool for an arm-propelled swimming robot")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize crank-slider dimensions or list catalogued builds
    Design(DesignArgs),
    /// Tabulate slider position, slope, and stroke phase over a revolution
    Mech(RunArgs),
    /// Capture bench-rig arm midlines and score early-recovery recurve
    Arm(RunArgs),
    /// Simulate straight vertical swimming and report per-cycle metrics
    Swim(RunArgs),
    /// Simulate planar steering with independent left/right motor speeds
    Steer(RunArgs),
    /// Run a grid of swim scenarios and tabulate one row per cell
    Sweep(SweepArgs),
}

/// Arguments shared by every scenario-driven subcommand.
#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML); built-in defaults apply when omitted
    #[arg(long, value_name = "PATH")]
    config: Option<std::path::PathBuf>,
    /// Directory for output artifacts (created if missing)
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: std::path::PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Worker threads for grid cells
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct DesignArgs {
    /// Travel ratio to synthesize a coupler length for (must exceed 1)
    #[arg(long, value_name = "K")]
    target_k: Option<f64>,
    /// Slider offset from the crank axis, mm
    #[arg(long, value_name = "MM", default_value_t = 40.0)]
    offset_e: f64,
    /// Crank radius, mm
    #[arg(long, value_name = "MM", default_value_t = 25.0)]
    crank_a: f64,
    /// Include the catalogued reference builds in the table
    #[arg(long)]
    presets: bool,
    /// Directory for design.csv (created if missing)
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: std::path::PathBuf,
}

/// Failure carrying its process exit code: usage/configuration errors
/// exit 2, runtime failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError::Runtime(message.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl From<VehicleError> for CliError {
    fn from(err: VehicleError) -> Self {
        match err {
            // A diverging integration is the one failure that only shows
            // up at runtime; everything else is a property of the inputs.
            VehicleError::Arm(ArmError::Unstable { .. }) => CliError::runtime(err.to_string()),
            _ => CliError::usage(err.to_string()),
        }
    }
}

impl From<MechanismError> for CliError {
    fn from(err: MechanismError) -> Self {
        CliError::usage(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::runtime(format!("io error: {err}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Design(args) => commands::design::run(args),
        Command::Mech(args) => commands::mech::run(args),
        Command::Arm(args) => commands::arm::run(args),
        Command::Swim(args) => commands::swim::run(args),
        Command::Steer(args) => commands::steer::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
