use std::process::ExitCode;

use clap::Parser;
use degen_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match degen_cli::run(&cli) {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
