use std::process::ExitCode;

use clap::Parser;
use pu_core::cli::{emit, run, Cli, EXIT_NUMERICAL};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if let Err(e) = emit(&cli.run, &outcome) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_NUMERICAL);
    }
    ExitCode::from(outcome.code)
}
