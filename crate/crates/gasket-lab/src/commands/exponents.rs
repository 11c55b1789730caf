use std::process::ExitCode;

use anyhow::Result;
use gasket_geometry::Family;
use network_resistance::{exponents, ExponentTable, RhoCache};

use crate::cli::{Cli, ExponentsArgs, Format};
use crate::output::{emit_json, fmt15, Sink};

pub fn run(cli: &Cli, args: &ExponentsArgs, cache: &mut RhoCache) -> Result<ExitCode> {
    let family: Family = args.family.into();
    let sides: Vec<u32> = match (args.side, args.side_range) {
        (Some(l), None) => vec![l],
        (None, Some((a, b))) => (a..=b).collect(),
        (None, None) => {
            return Err(super::UsageError("provide --side or --side-range".into()).into())
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let sides: Vec<u32> = match family {
        Family::Sg => sides,
        // Vicsek families are defined for odd sides
        _ => sides
            .into_iter()
            .filter(|l| l % 2 == 1 && *l >= 3)
            .collect(),
    };
    if sides.is_empty() {
        return Err(super::UsageError(format!("side sweep is empty for family {family}")).into());
    }

    let mut sink = Sink::open(&cli.out)?;
    let mut json_rows = Vec::new();
    if cli.format == Format::Csv {
        sink.line(&format!("{},dw_diag", ExponentTable::CSV_HEADER))?;
        sink.flush()?;
    }
    for &l in &sides {
        let table = exponents(family, args.dim, l, cache)?;
        match cli.format {
            Format::Csv => {
                sink.line(&format!(
                    "{},{}",
                    table.csv_row(),
                    fmt15(table.dw_diagnostic())
                ))?;
                sink.flush()?; // long sweeps stream rows as computed
            }
            Format::Json => {
                let mut row = serde_json::to_value(&table)?;
                row["dw_diag"] = serde_json::json!(table.dw_diagnostic());
                json_rows.push(row);
            }
        }
    }
    if cli.format == Format::Json {
        emit_json(&mut sink, &serde_json::Value::Array(json_rows))?;
    }
    Ok(ExitCode::SUCCESS)
}
