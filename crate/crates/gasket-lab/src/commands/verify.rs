use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Result;
use chain_solver::{boundary_identity_check, evolve, MassVector, WalkModel};
use gasket_geometry::{lattice_graph, Family, GasketSpec};
use network_resistance::{cache::rho_cached, vicsek_fixed_point, vicsek_rho_check, RhoCache};
use serde_json::json;
use stochastic_lab::{compare_kernels, probe_cell_masses, reference_steps, KernelContext};

use crate::cli::{Cli, Format, VerifyArgs};
use crate::output::{emit_json, Sink};

struct Gate {
    name: String,
    pass: bool,
    detail: String,
}

pub fn run(cli: &Cli, args: &VerifyArgs, cache: &mut RhoCache) -> Result<ExitCode> {
    let mut gates = Vec::new();
    match args.suite.as_str() {
        "identities" => identities(&mut gates)?,
        "vicsek" => vicsek(&mut gates)?,
        "kernels" => kernels(&mut gates, cache)?,
        "all" => {
            identities(&mut gates)?;
            vicsek(&mut gates)?;
            kernels(&mut gates, cache)?;
        }
        other => {
            eprintln!("gasket-lab: unknown verify suite '{other}' (expected identities | vicsek | kernels | all)");
            return Ok(ExitCode::from(2));
        }
    }

    let all_pass = gates.iter().all(|g| g.pass);
    for g in &gates {
        println!(
            "{} {}: {}",
            if g.pass { "PASS" } else { "FAIL" },
            g.name,
            g.detail
        );
    }
    if cli.format == Format::Json || cli.out.is_some() {
        let doc = json!({
            "operation": "verify",
            "inputs": { "suite": args.suite },
            "outputs": {
                "gates": gates.iter().map(|g| json!({
                    "name": g.name, "pass": g.pass, "detail": g.detail,
                })).collect::<Vec<_>>(),
            },
            "tolerances": {
                "boundary_identities": 1e-9,
                "vicsek_residual": 1e-10,
                "chapman_kolmogorov": 1e-12,
            },
            "pass": all_pass,
        });
        let mut sink = Sink::open(&cli.out)?;
        emit_json(&mut sink, &doc)?;
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn identities(gates: &mut Vec<Gate>) -> Result<()> {
    for d in [2u32, 3] {
        for l in [2u32, 3, 4] {
            for m in [1u32, 2] {
                let r = boundary_identity_check(d, l, m)?;
                let worst = r
                    .max_uniformity_deviation
                    .max(r.mean_ratio_deviation)
                    .max(r.overshoot_deviation);
                gates.push(Gate {
                    name: format!("boundary-identities d={d} l={l} m={m}"),
                    pass: r.pass,
                    detail: format!("worst deviation {worst:.3e} (tolerance 1e-9)"),
                });
            }
        }
    }
    Ok(())
}

fn vicsek(gates: &mut Vec<Gate>) -> Result<()> {
    for (family, sides) in [(Family::Vs2d, vec![3u32, 5]), (Family::Vs3d, vec![3, 5])] {
        for l in sides {
            let fp = vicsek_fixed_point(family, l, 1e-12, 500)?;
            let check = vicsek_rho_check(&fp)?;
            let gap = (check - fp.rho).abs() / fp.rho;
            let mut pass = fp.residual < 1e-10 && gap < 1e-8;
            let mut detail = format!(
                "rho {:.10}, residual {:.2e}, resistance-route gap {:.2e}",
                fp.rho, fp.residual, gap
            );
            if family == Family::Vs3d {
                let ordered = fp.params[0] <= 1.0 + 1e-12
                    && fp.params[1] <= fp.params[0] + 1e-12
                    && fp.params[1] >= 0.0;
                pass = pass && ordered;
                detail.push_str(&format!(
                    ", c2 {:.6}, c3 {:.6}, ordered {ordered}",
                    fp.params[0], fp.params[1]
                ));
            }
            gates.push(Gate {
                name: format!("vicsek-fixed-point {family} l={l}"),
                pass,
                detail,
            });
        }
    }
    Ok(())
}

fn kernels(gates: &mut Vec<Gate>, cache: &mut RhoCache) -> Result<()> {
    let ctx = KernelContext::default_simplex(2)?;
    let t_list = [0.25, 0.5, 1.0];
    let mut headlines = Vec::new();
    for l in [2u32, 4] {
        let spec = GasketSpec::sg(2, l, 2)?;
        let rho = rho_cached(cache, Family::Sg, 2, l)?;
        let rep = compare_kernels(&spec, rho, &t_list, &ctx)?;
        headlines.push((l, rep.headline));
    }
    let (d2, d4) = (headlines[0].1, headlines[1].1);
    gates.push(Gate {
        name: "kernel-trend D(4) < D(2)".into(),
        pass: d4 < d2,
        detail: format!("D(2) = {d2:.6}, D(4) = {d4:.6}"),
    });

    // Chapman-Kolmogorov at probe resolution on the reference lattice
    let side = stochastic_lab::default_reference_side(2);
    let graph = Arc::new(lattice_graph(2, side)?);
    let model = WalkModel::simple(graph.clone())?;
    let n1 = reference_steps(2, side, 0.25)?;
    let start = MassVector::point(graph.vertex_count(), graph.boundary[0])?;
    let at_t = evolve(&model, &start, n1);
    let composed = evolve(&model, &at_t, n1);
    let direct = evolve(&model, &start, 2 * n1);
    let m_composed = probe_cell_masses(&graph, &ctx.probes, &composed.values);
    let m_direct = probe_cell_masses(&graph, &ctx.probes, &direct.values);
    let worst = m_composed
        .iter()
        .zip(m_direct.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    gates.push(Gate {
        name: "reference Chapman-Kolmogorov".into(),
        pass: worst <= 1e-12,
        detail: format!("worst probe-mass gap {worst:.3e} (tolerance 1e-12)"),
    });
    Ok(())
}
