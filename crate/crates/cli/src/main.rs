//! `cotypelab` command-line tool.
//!
//! Exit codes: 0 when every verdict passes, 1 when some inequality or check fails,
//! 2 for usage, parse and validation errors.

mod cli;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use commands::Outcome;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Analyze(a) => commands::analyze(a, cli.json),
        Command::Tree(a) => commands::tree(a, cli.json),
        Command::Isoperimetry(a) => commands::isoperimetry(a, cli.json),
        Command::Cotype(a) => commands::cotype(a, cli.json),
        Command::Transfer(a) => commands::transfer(a, cli.json),
        Command::Chain(a) => commands::chain(a, cli.json),
        Command::Gen(a) => commands::gen(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
