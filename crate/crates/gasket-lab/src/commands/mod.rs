mod exponents;
mod kernel;
mod resistance;
mod simulate;
mod verify;
mod vicsek;

use std::process::ExitCode;

use anyhow::Result;
use network_resistance::RhoCache;

use crate::cli::{Cli, Command};

/// Input validation failures beyond what clap can see; exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "usage: {}", self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let mut cache = open_cache(&cli)?;
    match &cli.command {
        Command::Exponents(args) => exponents::run(&cli, args, &mut cache),
        Command::Resistance(args) => resistance::run(&cli, args, &mut cache),
        Command::Simulate(args) => simulate::run(&cli, args, &mut cache),
        Command::Kernel(args) => kernel::run(&cli, args, &mut cache),
        Command::Vicsek(args) => vicsek::run(&cli, args, &mut cache),
        Command::Verify(args) => verify::run(&cli, args, &mut cache),
    }
}

/// GASKET_LAB_CACHE takes precedence over --cache; neither means in-memory.
fn open_cache(cli: &Cli) -> Result<RhoCache> {
    if let Ok(path) = std::env::var("GASKET_LAB_CACHE") {
        if !path.is_empty() {
            return Ok(RhoCache::load(path)?);
        }
    }
    match &cli.cache {
        Some(path) => Ok(RhoCache::load(path)?),
        None => Ok(RhoCache::in_memory()),
    }
}
