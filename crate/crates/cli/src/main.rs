//! `psmet` — information ledger of postselected weak measurement.

mod cli;
mod commands;
mod config;
mod fail;
mod peak;
mod verify;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::fail::CliError;

fn run(parsed: &Cli) -> Result<(), CliError> {
    let cfg = config::resolve(parsed.command.args())?;
    match &parsed.command {
        Command::Ledger(_) => commands::run_single(&cfg, false),
        Command::Recycle(_) => commands::run_single(&cfg, true),
        Command::Sweep(_) => commands::run_sweep(&cfg),
        Command::Peak(_) => peak::run(&cfg),
        Command::Verify(_) => verify::run(&cfg),
    }
}

fn main() {
    let parsed = Cli::parse();
    if let Err(err) = run(&parsed) {
        eprintln!("psmet: {}", err.message);
        std::process::exit(err.code);
    }
}
