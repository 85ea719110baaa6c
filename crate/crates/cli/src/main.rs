mod commands;
mod config;
mod output;
mod svg;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use commands::Outcome;
use config::{Cli, Command, RunConfig};

const THREADS_VAR: &str = "VORTEXFIELD_THREADS";

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    configure_threads()?;
    let config = RunConfig::resolve(&cli.options)?;
    match cli.command {
        Command::Minimize => commands::minimize::run(&config),
        Command::Landscape => commands::landscape::run(&config),
        Command::Field => commands::field::run(&config),
        Command::Verify => commands::verify::run(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
