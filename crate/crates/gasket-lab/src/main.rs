mod cli;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

/// Stable exit codes: 0 success, 1 gate or I/O failure, 2 usage error,
/// 3 numerical failure.
fn main() -> ExitCode {
    let cli = cli::Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("gasket-lab: could not size the worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("gasket-lab: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<commands::UsageError>().is_some() {
            return 2;
        }
        if let Some(net) = cause.downcast_ref::<network_resistance::NetError>() {
            return match net {
                network_resistance::NetError::InvalidInput(_) => 2,
                _ => 3,
            };
        }
        if let Some(chain) = cause.downcast_ref::<chain_solver::ChainError>() {
            return match chain {
                chain_solver::ChainError::InvalidInput(_) => 2,
                _ => 3,
            };
        }
        if let Some(lab) = cause.downcast_ref::<stochastic_lab::LabError>() {
            return match lab {
                stochastic_lab::LabError::InvalidInput(_) => 2,
                _ => 3,
            };
        }
        if cause
            .downcast_ref::<gasket_geometry::GeometryError>()
            .is_some()
        {
            return 2;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 1;
        }
    }
    1
}
