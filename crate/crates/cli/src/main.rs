//! `lct`: linear canonical transformations as quantum propagator kernels.
//!
//! Every subcommand reads the same merged configuration (defaults, then
//! --config JSON, then flags) and exits 0 on success, 1 when a requested
//! check fails, 2 on configuration problems, 3 at caustics, 4 when a grid
//! cannot resolve the kernel it was asked to carry.

mod commands;
mod config;
mod error;
mod expr;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::Method;
use config::{GridConfig, Overrides, SystemKind};
use error::CliError;

fn parse_grid_flag(s: &str) -> Result<GridConfig, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected N,origin,spacing".into());
    }
    let n = parts[0].trim().parse::<usize>().map_err(|e| format!("grid size: {e}"))?;
    let origin = parts[1].trim().parse::<f64>().map_err(|e| format!("grid origin: {e}"))?;
    let spacing = parts[2].trim().parse::<f64>().map_err(|e| format!("grid spacing: {e}"))?;
    Ok(GridConfig { n, origin, spacing })
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// System preset.
    #[arg(long, global = true, value_name = "NAME")]
    system: Option<SystemKind>,

    /// Evolution time.
    #[arg(long = "t", global = true, value_name = "REAL")]
    time: Option<f64>,

    /// Grid as N,origin,spacing.
    #[arg(long, global = true, value_name = "N,ORIGIN,SPACING", value_parser = parse_grid_flag)]
    grid: Option<GridConfig>,

    /// Report or wavefunction destination (stdout when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// How kernels are applied: direct quadrature or the fast path.
    #[arg(long, global = true, value_name = "METHOD")]
    method: Option<Method>,

    /// Planck constant.
    #[arg(long, global = true, value_name = "REAL")]
    hbar: Option<f64>,

    /// Particle mass.
    #[arg(long, global = true, value_name = "REAL")]
    mass: Option<f64>,

    /// Oscillator frequency.
    #[arg(long, global = true, value_name = "REAL")]
    omega: Option<f64>,

    /// Print the merged configuration as JSON and exit without running.
    #[arg(long, global = true)]
    dump_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check ad - bc = 1 and the compatibility condition over a time sweep.
    Validate,
    /// Build the kernel at the configured time and dump its data.
    Kernel,
    /// Apply the kernel to the initial state; write the evolved wavefunction.
    Propagate,
    /// Run the kernel against the Crank-Nicolson integrator and report deviations.
    Compare {
        /// Oracle potential, when it should differ from the configured system.
        #[arg(long, value_name = "NAME")]
        oracle_system: Option<SystemKind>,
    },
    /// Time direct vs fast kernel application over a grid-size sweep.
    Bench {
        /// Largest grid size in the sweep.
        #[arg(long, default_value_t = 16384)]
        max_n: usize,
    },
}

#[derive(Parser)]
#[command(
    name = "lct",
    version,
    about = "Turn linear canonical transformations into quantum propagator kernels"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = config::load(cli.common.config.as_deref())?;
    config.apply(&Overrides {
        system: cli.common.system,
        time: cli.common.time,
        grid: cli.common.grid,
        hbar: cli.common.hbar,
        mass: cli.common.mass,
        omega: cli.common.omega,
    });

    if cli.common.dump_config {
        let text = serde_json::to_string_pretty(&config)
            .map_err(|e| CliError::Config(format!("serializing config: {e}")))?;
        println!("{text}");
        return Ok(());
    }

    let out = cli.common.out.as_deref();
    let method = cli.common.method.unwrap_or(Method::Fast);
    match cli.command {
        Command::Validate => commands::cmd_validate(&config, out),
        Command::Kernel => commands::cmd_kernel(&config, out),
        Command::Propagate => commands::cmd_propagate(&config, method, out),
        Command::Compare { oracle_system } => {
            commands::cmd_compare(&config, method, oracle_system, out)
        }
        Command::Bench { max_n } => commands::cmd_bench(&config, max_n, out),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
