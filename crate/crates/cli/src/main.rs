//! `pseudocone` command-line tool.
//!
//! Reads cones, pseudo-cones and measures as JSON, writes JSON documents and
//! CSV tables. Failures print a one-line JSON error record on stderr and exit
//! with a code that identifies the failure class.

mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
