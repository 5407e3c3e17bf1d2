//! Command-line front end for `aperture-forge-core`: argument and config
//! handling, provenance-stamped output writers and the subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use config::{Cli, Command};
use error::CliResult;
use output::Sink;

/// Runs a parsed command line.
pub fn run(cli: Cli) -> CliResult<Sink> {
    match cli.command {
        Command::Spacing(a) => commands::spacing(a),
        Command::Design(a) => commands::design(a),
        Command::Crb(a) => commands::crb(a),
        Command::MseBound(a) => commands::mse_bound(a),
        Command::DemoEstimate(a) => commands::demo_estimate(a),
    }
}
