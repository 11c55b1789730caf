use std::process::ExitCode;

use anyhow::Result;
use gasket_geometry::Family;
use network_resistance::{
    cache::CacheEntry, eta, vicsek_fixed_point, vicsek_rho_check, vs3d_rho_liminf, RhoCache,
};

use crate::cli::{Cli, Format, VicsekArgs};
use crate::output::{emit_json, fmt15, report, Sink};

pub fn run(cli: &Cli, args: &VicsekArgs, cache: &mut RhoCache) -> Result<ExitCode> {
    let family: Family = args.family.into();
    if family == Family::Sg {
        return Err(super::UsageError(
            "the vicsek command applies to --family vs2d or vs3d".into(),
        )
        .into());
    }
    let fp = vicsek_fixed_point(family, args.side, args.tolerance, args.max_iter)?;
    let rho_check = vicsek_rho_check(&fp)?;
    let d = if family == Family::Vs2d { 2 } else { 3 };
    cache.validate_and_insert(
        family,
        d,
        args.side,
        CacheEntry {
            rho: fp.rho,
            residual: fp.residual,
            method: "fixed-point".into(),
        },
    )?;

    let mut outputs = serde_json::json!({
        "fixed_point": serde_json::to_value(&fp)?,
        "rho_resistance_route": rho_check,
        "rho_route_relative_gap": (fp.rho - rho_check).abs() / fp.rho,
    });
    if family == Family::Vs3d {
        let (a, b) = (1.0 / fp.params[0], 1.0 / fp.params[1]);
        let (a, b) = (a.max(1.0), b.max(1.0));
        outputs["eta"] = serde_json::json!(eta(a, b)?);
        outputs["rho_liminf_bound"] = serde_json::json!(vs3d_rho_liminf(a, b)?);
    }
    let doc = report(
        "vicsek",
        serde_json::json!({
            "family": family.as_str(),
            "side": args.side,
            "tolerance": args.tolerance,
            "max_iter": args.max_iter,
        }),
        outputs.clone(),
        serde_json::json!({ "residual": args.tolerance }),
        Some(fp.residual < args.tolerance),
    );

    let mut sink = Sink::open(&cli.out)?;
    match cli.format {
        Format::Json => emit_json(&mut sink, &doc)?,
        Format::Csv => {
            sink.line("key,value")?;
            sink.line(&format!("rho,{}", fmt15(fp.rho)))?;
            for (i, p) in fp.params.iter().enumerate() {
                sink.line(&format!("param_{i},{}", fmt15(*p)))?;
            }
            sink.line(&format!("residual,{}", fmt15(fp.residual)))?;
            sink.line(&format!("iterations,{}", fp.iterations))?;
            sink.line(&format!("rho_resistance_route,{}", fmt15(rho_check)))?;
            sink.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
