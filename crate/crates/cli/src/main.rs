use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod config;
mod output;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::SampleExact(a) => commands::cmd_sample_exact(a),
        Command::Verify(a) => commands::cmd_verify(a),
        Command::Compare(a) => commands::cmd_compare(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("sns: {e}");
        e.exit_code()
    })
}
