//! Experiment driver for `densmat`: each subcommand writes plot-ready tables
//! plus a `<command>_report.json` with the resolved config, threshold checks
//! and wall-clock time.

pub mod commands;
pub mod config;
pub mod output;

use anyhow::Result;
use config::{Cli, Command, ExperimentConfig};
use std::time::Instant;

/// Runs one subcommand; `Ok(false)` means a configured check failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let start = Instant::now();
    let args = cli.command.args();
    let config = ExperimentConfig::new(cli.command.name(), args)?;
    let run = match &cli.command {
        Command::Sample(a) => commands::sample::execute(a, config)?,
        Command::Density(a) => commands::density::execute(a, config)?,
        Command::Moments(a) => commands::moments::execute(a, config)?,
        Command::Mp(a) => commands::mp::execute(a, config)?,
        Command::Edge(a) => commands::edge::execute(a, config)?,
        Command::Firstmodel(a) => commands::firstmodel::execute(a, config)?,
    };
    run.finish(start.elapsed().as_secs_f64())
}
