//! `thzqkd`: secret key rates and operating limits of cryogenic THz CV-QKD links.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod plot;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Overrides;
use crate::error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "thzqkd",
    version,
    about = "CV-QKD key rates over cryogenic THz MIMO links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum temperature and 32x32 secure distance per frequency (CSV/JSON/plot).
    Table1(Overrides),
    /// ζ versus temperature for each frequency, with the α = 0 line.
    Fig2(Overrides),
    /// Key rate versus distance; --nt/--nr lists overlay several arrays.
    RateSweep(Overrides),
    /// Largest distance meeting the target rate, as a JSON report.
    MaxDistance(Overrides),
    /// Highest temperature with ζ above α, as a JSON report.
    MaxTemp(Overrides),
}

fn print_paths(paths: Vec<std::path::PathBuf>) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn print_bytes(bytes: &[u8]) -> Result<()> {
    std::io::stdout()
        .write_all(bytes)
        .map_err(|e| CliError::io("<stdout>", e))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Table1(o) => print_paths(commands::table1(&o.resolve()?)?),
        Command::Fig2(o) => print_paths(commands::fig2(&o.resolve()?)?),
        Command::RateSweep(o) => print_paths(commands::rate_sweep(&o.resolve()?)?),
        Command::MaxDistance(o) => print_bytes(&commands::max_distance(&o.resolve()?)?)?,
        Command::MaxTemp(o) => print_bytes(&commands::max_temp(&o.resolve()?)?)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
