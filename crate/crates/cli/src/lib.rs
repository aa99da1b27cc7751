//! Experiment runner: configuration, subcommands and deterministic output.

pub mod args;
pub mod commands;
pub mod config;
pub mod emit;
pub mod error;
pub mod initial;
pub mod verify;

use args::{Cli, Command};
use commands::{Outcome, Outputs};
use config::{Overrides, RunConfig};
pub use error::{CliError, Result};

pub fn overrides(cli: &Cli) -> Overrides {
    let mut o = Overrides {
        common: cli.common.clone(),
        ..Overrides::default()
    };
    match &cli.command {
        Command::Operator(a) => o.operator = a.clone(),
        Command::Verify(a) => o.verify = a.clone(),
        Command::Simulate(a) => o.simulate = a.clone(),
        Command::Stabilize(a) => o.stabilize = a.clone(),
        Command::Spectrum | Command::BesselSelftest => {}
    }
    o
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::resolve(&overrides(cli))?;
    let out = Outputs {
        csv: cli.common.out.as_deref(),
        report: cli.common.report.as_deref(),
    };
    match &cli.command {
        Command::Spectrum => commands::spectrum(&cfg, out),
        Command::Operator(_) => commands::operator_cmd(&cfg, out),
        Command::Verify(_) => commands::verify(&cfg, out),
        Command::Simulate(_) => commands::simulate_cmd(&cfg, out),
        Command::Stabilize(_) => commands::stabilize(&cfg, out),
        Command::BesselSelftest => commands::bessel_selftest(out),
    }
}
