use std::process::ExitCode;

use anyhow::Result;
use gasket_geometry::GasketSpec;
use network_resistance::{
    cache::rho_cached, corner_resistance, resistance_diameter, rho_via_trace, RhoCache,
};

use crate::cli::{Cli, Format, ResistanceArgs};
use crate::output::{emit_json, fmt15, report, Sink};

pub fn run(cli: &Cli, args: &ResistanceArgs, cache: &mut RhoCache) -> Result<ExitCode> {
    let spec = GasketSpec::sg(args.dim, args.side, args.level)?;
    let corner = corner_resistance(args.dim, args.side, args.level)?;
    let rho = rho_cached(cache, gasket_geometry::Family::Sg, args.dim, args.side)?;
    let rho_trace = rho_via_trace(args.dim, args.side)?;
    let route_gap = (rho - rho_trace).abs() / rho;

    let mut outputs = serde_json::json!({
        "corner_resistance_unit": corner,
        "rho": rho,
        "rho_via_trace": rho_trace,
        "rho_route_relative_gap": route_gap,
    });
    if args.diameter {
        let d = resistance_diameter(&spec)?;
        outputs["diameter"] = serde_json::json!({
            "exact_at_level": d.exact_at_level,
            "upper_bound": d.upper_bound,
        });
    }
    let pass = route_gap <= 1e-10;
    let doc = report(
        "resistance",
        serde_json::json!({
            "family": "sg",
            "dim": args.dim,
            "side": args.side,
            "level": args.level,
            "diameter": args.diameter,
        }),
        outputs.clone(),
        serde_json::json!({ "rho_route_agreement": 1e-10 }),
        Some(pass),
    );

    let mut sink = Sink::open(&cli.out)?;
    match cli.format {
        Format::Json => emit_json(&mut sink, &doc)?,
        Format::Csv => {
            sink.line("key,value")?;
            sink.line(&format!("corner_resistance_unit,{}", fmt15(corner)))?;
            sink.line(&format!("rho,{}", fmt15(rho)))?;
            sink.line(&format!("rho_via_trace,{}", fmt15(rho_trace)))?;
            sink.line(&format!("rho_route_relative_gap,{}", fmt15(route_gap)))?;
            if let Some(d) = outputs.get("diameter") {
                sink.line(&format!(
                    "diameter_exact_at_level,{}",
                    fmt15(d["exact_at_level"].as_f64().unwrap_or(f64::NAN))
                ))?;
                sink.line(&format!(
                    "diameter_upper_bound,{}",
                    fmt15(d["upper_bound"].as_f64().unwrap_or(f64::NAN))
                ))?;
            }
            sink.line(&format!("pass,{pass}"))?;
            sink.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
