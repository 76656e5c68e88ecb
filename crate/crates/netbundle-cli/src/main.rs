//! `netbundle`: compare adoption equilibria of two network services sold
//! separately or as a bundle, sweep parameters, map equilibrium regions,
//! cross-check against agent simulations, and verify feasibility tables.
//!
//! All randomized work is seeded, so identical invocations produce
//! byte-identical output. Exit codes: 0 success, 2 configuration error,
//! 3 solver failure, 4 table discrepancy.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::CliError;
use crate::output::Format;

#[derive(Parser)]
#[command(
    name = "netbundle",
    version,
    about = "Adoption equilibria of two network services, separate versus bundled"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON configuration file (required by every subcommand)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write output to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Base seed for all randomized work
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the sweep grid size from the config
    #[arg(long, global = true)]
    steps: Option<u32>,
    /// Output format; defaults to json for analyze and csv elsewhere
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compare separate and bundled equilibria for one scenario
    Analyze,
    /// Sweep one scenario parameter over a uniform grid
    Sweep,
    /// Classify the lowest stable equilibrium over a (c, e) grid
    RegionMap,
    /// Simulate best-response dynamics and check the analytic equilibrium
    Montecarlo,
    /// Verify a printed feasibility table by condition algebra and sampling
    Table,
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let lc = config::load(path)?;
    let fmt = |default| cli.format.unwrap_or(default);
    let result = match cli.command {
        Cmd::Analyze => commands::cmd_analyze(&lc, fmt(Format::Json))?,
        Cmd::Sweep => commands::cmd_sweep(&lc, fmt(Format::Csv), cli.steps)?,
        Cmd::RegionMap => commands::cmd_region_map(&lc, fmt(Format::Csv))?,
        Cmd::Montecarlo => commands::cmd_montecarlo(&lc, fmt(Format::Csv), cli.seed)?,
        Cmd::Table => commands::cmd_table(&lc, fmt(Format::Csv), cli.seed)?,
    };
    output::write_output(cli.out.as_deref(), &result.text)?;
    Ok(ExitCode::from(result.exit))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
