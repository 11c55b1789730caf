use std::process::ExitCode;

use anyhow::{Context, Result};
use gasket_geometry::{Family, GasketSpec};
use network_resistance::{cache::rho_cached, RhoCache};
use stochastic_lab::{
    compare_kernels, kernel_estimate, KernelContext, KernelEstimate, KernelMode, ProbeSet,
    SimConfig,
};

use crate::cli::{Cli, Format, KernelArgs, Mode};
use crate::output::{emit_json, fmt15, report, Sink};

pub fn run(cli: &Cli, args: &KernelArgs, cache: &mut RhoCache) -> Result<ExitCode> {
    if args.t.is_empty() {
        return Err(super::UsageError("at least one --t value is required".into()).into());
    }
    let spec = GasketSpec::sg(args.dim, args.side, args.level)?;
    let probes = match &args.probes {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading probe file {path:?}"))?;
            serde_json::from_str::<ProbeSet>(&text)
                .with_context(|| format!("parsing probe file {path:?}"))?
        }
        None => ProbeSet::default_for_dimension(args.dim)?,
    };
    let reference_side = args
        .reference_side
        .unwrap_or_else(|| stochastic_lab::default_reference_side(args.dim));
    let ctx = KernelContext::simplex(probes, args.dim, reference_side)?;
    let rho = rho_cached(cache, Family::Sg, args.dim, args.side)?;

    let mut sink = Sink::open(&cli.out)?;
    if args.compare {
        let rep = compare_kernels(&spec, rho, &args.t, &ctx)?;
        let doc = report(
            "kernel-compare",
            serde_json::json!({
                "family": "sg", "dim": args.dim, "side": args.side, "level": args.level,
                "t": args.t, "reference_side": reference_side,
                "probe_hash": ctx.probes.content_hash(),
            }),
            serde_json::to_value(&rep)?,
            serde_json::json!({}),
            None,
        );
        match cli.format {
            Format::Json => emit_json(&mut sink, &doc)?,
            Format::Csv => {
                sink.line("t,max_abs_discrepancy,mean_abs_discrepancy")?;
                for row in &rep.rows {
                    sink.line(&format!(
                        "{},{},{}",
                        row.t,
                        fmt15(row.max_abs_discrepancy),
                        fmt15(row.mean_abs_discrepancy)
                    ))?;
                }
                sink.line(&format!("headline,{},", fmt15(rep.headline)))?;
                sink.flush()?;
            }
        }
        return Ok(ExitCode::SUCCESS);
    }

    let mode = match args.mode {
        Mode::Exact => KernelMode::Exact,
        Mode::Mc => KernelMode::Mc,
    };
    let config = SimConfig::new(args.seed, args.samples)?;
    let estimates: Vec<KernelEstimate> = args
        .t
        .iter()
        .map(|&t| kernel_estimate(&spec, rho, t, &ctx, mode, None, Some(&config)))
        .collect::<stochastic_lab::Result<_>>()?;

    match cli.format {
        Format::Json => {
            let doc = report(
                "kernel",
                serde_json::json!({
                    "family": "sg", "dim": args.dim, "side": args.side, "level": args.level,
                    "t": args.t, "mode": mode, "seed": args.seed,
                    "samples": if mode == KernelMode::Mc { Some(args.samples) } else { None },
                    "reference_side": reference_side,
                    "probe_hash": ctx.probes.content_hash(),
                }),
                serde_json::to_value(&estimates)?,
                serde_json::json!({}),
                None,
            );
            emit_json(&mut sink, &doc)?;
        }
        Format::Csv => {
            // probe x t density matrix
            let mut header = String::from("probe");
            for t in &args.t {
                header.push_str(&format!(",t={t}"));
            }
            sink.line(&header)?;
            for p in 0..ctx.probes.len() {
                let mut row = format!("{p}");
                for est in &estimates {
                    row.push_str(&format!(",{}", fmt15(est.densities[p])));
                }
                sink.line(&row)?;
            }
            sink.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
