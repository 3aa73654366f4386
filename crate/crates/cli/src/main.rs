// SPDX-License-Identifier: Apache-2.0

//! `qtele`: batch runner for the teleportation experiments.
//!
//! Every command writes CSV with a header row and a trailing `# config` line.
//! Exit codes: 0 success, 1 failed check or runtime error, 2 bad config.

mod args;
mod commands;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Verify(a) => verify::run(&a),
        Command::Deteriorate(a) => commands::deteriorate(&a),
        Command::Recover(a) => commands::recover(&a),
        Command::Stabilize(a) => commands::stabilize(&a),
        Command::Replay(a) => commands::replay(&a),
        Command::Protocol(a) => commands::protocol(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qtele: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
