use std::sync::Arc;

use chain_solver::{evolve, MassVector, WalkModel};
use gasket_geometry::GasketSpec;
use serde::Serialize;

use crate::kernels::kernel_steps;
use crate::probes::kernel_graph;
use crate::{KernelContext, KernelMode, LabError, Result};

/// Cap on the number of start vertices scanned per time point.
const ONDIAG_START_CAP: usize = 256;

#[derive(Debug, Clone, Serialize)]
pub struct OndiagRow {
    pub t: f64,
    pub steps: u64,
    pub max_return_density: f64,
}

/// Log-log profile of the worst-case return density against rescaled time,
/// with the slope fitted over the Euclidean window t in [l^-2, 1].
#[derive(Debug, Clone, Serialize)]
pub struct OndiagReport {
    pub d: u32,
    pub l: u32,
    pub m: u32,
    pub rows: Vec<OndiagRow>,
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
    /// number of points used by the fit
    pub fit_points: usize,
    /// whether the fit used only times inside [l^-2, 1]
    pub fit_in_window: bool,
    /// slope within d/2 +- 0.5 of the Euclidean decay exponent
    pub slope_in_band: bool,
}

/// Worst-case return density over a deterministic start sample, per time.
/// A vertex's return density histograms its mass into its finest cells
/// (shared corners split equally among incident cells) and divides by the
/// uniform cell measure.
pub fn ondiag_check(spec: &GasketSpec, rho: f64, t_list: &[f64]) -> Result<OndiagReport> {
    if t_list.is_empty() {
        return Err(LabError::InvalidInput("empty time list".into()));
    }
    let graph = Arc::new(kernel_graph(spec)?);
    let model = WalkModel::simple(graph.clone())?;
    let n = graph.vertex_count();
    let stride = n.div_ceil(ONDIAG_START_CAP).max(1);
    let mut starts: Vec<usize> = (0..n).step_by(stride).collect();
    // the extremes live at the boundary corners; always scan them
    for &b in &graph.boundary {
        if !starts.contains(&b) {
            starts.push(b);
        }
    }
    let cell_measure = 1.0 / spec.total_cells()? as f64;

    // cell membership is vertex -> cells; invert once for the histogram
    let mut cell_vertices: Vec<Vec<usize>> = vec![Vec::new(); graph.cells.len()];
    for (v, cells) in graph.cell_membership.iter().enumerate() {
        for &c in cells {
            cell_vertices[c].push(v);
        }
    }

    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let steps = kernel_steps(spec, rho, t)?;
        let mut max_density = 0.0f64;
        for &start in &starts {
            let mass = evolve(&model, &MassVector::point(n, start)?, steps);
            // direct histogram at the start's own cells
            let mut density = 0.0;
            let my_cells = &graph.cell_membership[start];
            for &cell in my_cells {
                let mut cell_mass = 0.0;
                for &w in &cell_vertices[cell] {
                    cell_mass += mass.values[w] / graph.cell_membership[w].len() as f64;
                }
                density += cell_mass / cell_measure / my_cells.len() as f64;
            }
            max_density = max_density.max(density);
        }
        rows.push(OndiagRow {
            t,
            steps,
            max_return_density: max_density,
        });
    }

    let lo = 1.0 / (spec.side as f64).powi(2);
    let mut fit: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.t >= lo * (1.0 - 1e-12) && r.t <= 1.0 + 1e-12)
        .map(|r| (r.t.ln(), r.max_return_density.ln()))
        .collect();
    let in_window = fit.len() >= 2;
    if !in_window {
        // not enough points in the Euclidean window; fit whatever was given
        fit = rows
            .iter()
            .map(|r| (r.t.ln(), r.max_return_density.ln()))
            .collect();
        if fit.len() < 2 {
            return Err(LabError::InvalidInput(
                "need at least two times for the slope fit".into(),
            ));
        }
    }
    let (slope, intercept) = fit_line(&fit);
    let target = -(spec.dimension as f64) / 2.0;
    Ok(OndiagReport {
        d: spec.dimension,
        l: spec.side,
        m: spec.level,
        rows,
        fitted_slope: slope,
        fitted_intercept: intercept,
        fit_points: fit.len(),
        fit_in_window: in_window,
        slope_in_band: (slope - target).abs() <= 0.5,
    })
}

fn fit_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderRow {
    pub delta: f64,
    pub modulus: f64,
}

/// Empirical modulus of continuity of the probe densities at one time:
/// the largest density gap between probes at center distance <= delta.
#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    pub d: u32,
    pub l: u32,
    pub m: u32,
    pub t: f64,
    pub rows: Vec<HolderRow>,
    /// log-log slope of modulus against delta; positive means genuine decay
    /// of oscillation with distance
    pub fitted_gamma: f64,
    pub modulus_at_tenth: f64,
    pub probe_hash: String,
}

pub fn holder_modulus(
    spec: &GasketSpec,
    rho: f64,
    t: f64,
    ctx: &KernelContext,
    deltas: &[f64],
) -> Result<HolderReport> {
    if deltas.is_empty() {
        return Err(LabError::InvalidInput("empty delta sweep".into()));
    }
    let est = crate::kernel_estimate(spec, rho, t, ctx, KernelMode::Exact, None, None)?;
    let centers: Vec<&Vec<f64>> = ctx.probes.probes.iter().map(|p| &p.center).collect();
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let mut modulus = 0.0f64;
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                let dist: f64 = centers[i]
                    .iter()
                    .zip(centers[j].iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if dist > 0.0 && dist <= delta {
                    modulus = modulus.max((est.densities[i] - est.densities[j]).abs());
                }
            }
        }
        rows.push(HolderRow { delta, modulus });
    }
    let fit: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.modulus > 0.0)
        .map(|r| (r.delta.ln(), r.modulus.ln()))
        .collect();
    let fitted_gamma = if fit.len() >= 2 {
        fit_line(&fit).0
    } else {
        f64::NAN
    };
    let modulus_at_tenth = rows
        .iter()
        .filter(|r| r.delta <= 0.1 + 1e-12)
        .map(|r| r.modulus)
        .fold(0.0f64, f64::max);
    Ok(HolderReport {
        d: spec.dimension,
        l: spec.side,
        m: spec.level,
        t,
        rows,
        fitted_gamma,
        modulus_at_tenth,
        probe_hash: ctx.probes.content_hash(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ondiag_slope_near_equilibrium_is_flat() {
        // far beyond the mixing horizon every density ratio is ~1, so the
        // fitted slope over large times is near zero
        let spec = GasketSpec::sg(2, 2, 1).unwrap();
        let report = ondiag_check(&spec, 5.0 / 3.0, &[30.0, 60.0]).unwrap();
        let r0 = &report.rows[0];
        let r1 = &report.rows[1];
        assert!((r0.max_return_density - r1.max_return_density).abs() < 0.05);
    }

    #[test]
    fn holder_zero_delta_gives_zero() {
        let ctx = KernelContext::simplex(crate::ProbeSet::default_for_dimension(2).unwrap(), 2, 16)
            .unwrap();
        let spec = GasketSpec::sg(2, 2, 1).unwrap();
        let r = holder_modulus(&spec, 5.0 / 3.0, 0.5, &ctx, &[1e-9, 0.1, 0.3]).unwrap();
        assert_eq!(r.rows[0].modulus, 0.0);
        assert!(r.rows[2].modulus >= r.rows[1].modulus);
    }
}
