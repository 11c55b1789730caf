use std::process::ExitCode;

use anyhow::Result;
use network_resistance::{cache::rho_cached, RhoCache};
use stochastic_lab::{t1_concentration, SimConfig};

use crate::cli::{Cli, Format, SimulateArgs};
use crate::output::{emit_json, fmt15, report, Sink};

pub fn run(cli: &Cli, args: &SimulateArgs, cache: &mut RhoCache) -> Result<ExitCode> {
    let rho = rho_cached(cache, gasket_geometry::Family::Sg, args.dim, args.side)?;
    let config = SimConfig::new(args.seed, args.samples)?;
    let rep = t1_concentration(args.dim, args.side, args.level, rho, args.t, &config)?;

    let doc = report(
        "simulate",
        serde_json::json!({
            "family": "sg",
            "dim": args.dim,
            "side": args.side,
            "level": args.level,
            "horizon": args.t,
            "seed": args.seed,
            "samples": args.samples,
        }),
        serde_json::to_value(&rep)?,
        serde_json::json!({ "mc_vs_exact_gate": "4 sigma" }),
        None,
    );
    let mut sink = Sink::open(&cli.out)?;
    match cli.format {
        Format::Json => emit_json(&mut sink, &doc)?,
        Format::Csv => {
            sink.line("key,value")?;
            sink.line(&format!(
                "exact_mean_t1_steps,{}",
                fmt15(rep.exact_mean_t1_steps)
            ))?;
            sink.line(&format!(
                "empirical_mean_t1_steps,{}",
                fmt15(rep.empirical_mean_t1_steps)
            ))?;
            sink.line(&format!(
                "empirical_t1_std_error,{}",
                fmt15(rep.empirical_t1_std_error)
            ))?;
            sink.line(&format!("tau,{}", fmt15(rep.tau)))?;
            sink.line(&format!("sup_q10,{}", fmt15(rep.sup_quantiles.q10)))?;
            sink.line(&format!("sup_q25,{}", fmt15(rep.sup_quantiles.q25)))?;
            sink.line(&format!("sup_median,{}", fmt15(rep.sup_quantiles.median)))?;
            sink.line(&format!("sup_q75,{}", fmt15(rep.sup_quantiles.q75)))?;
            sink.line(&format!("sup_q90,{}", fmt15(rep.sup_quantiles.q90)))?;
            sink.line(&format!("sup_max,{}", fmt15(rep.sup_quantiles.max)))?;
            sink.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
