use std::sync::Arc;

use chain_solver::{evolve, MassVector, WalkModel};
use gasket_geometry::{lattice_graph, GasketSpec};
use serde::Serialize;

use crate::probes::{cell_mass_histogram, cell_positions, kernel_graph};
use crate::{endpoint_distribution, LabError, ProbeSet, Result, SimConfig};

/// Default fine-lattice side for reference kernels and density normalizers.
pub fn default_reference_side(d: u32) -> u32 {
    if d == 2 {
        64
    } else {
        16
    }
}

/// A probe set together with its precomputed density normalizers.
#[derive(Debug, Clone)]
pub struct KernelContext {
    pub probes: ProbeSet,
    pub reference_fractions: Vec<f64>,
    pub dimension: u32,
    pub reference_side: u32,
}

impl KernelContext {
    /// Normalizers from the fine simplex lattice (gasket-family carrier).
    pub fn simplex(probes: ProbeSet, d: u32, reference_side: u32) -> Result<Self> {
        let reference_fractions = probes.reference_fractions_simplex(d, reference_side)?;
        Ok(KernelContext {
            probes,
            reference_fractions,
            dimension: d,
            reference_side,
        })
    }

    /// Normalizers from the fine cubic grid (Vicsek-family carrier).
    pub fn grid(probes: ProbeSet, d: u32, reference_side: u32) -> Result<Self> {
        let reference_fractions = probes.reference_fractions_grid(d, reference_side)?;
        Ok(KernelContext {
            probes,
            reference_fractions,
            dimension: d,
            reference_side,
        })
    }

    pub fn default_simplex(d: u32) -> Result<Self> {
        Self::simplex(
            ProbeSet::default_for_dimension(d)?,
            d,
            default_reference_side(d),
        )
    }

    fn densities(&self, masses: &[f64]) -> Vec<f64> {
        masses
            .iter()
            .zip(self.reference_fractions.iter())
            .map(|(m, f)| m / f)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMode {
    Exact,
    Mc,
}

/// Probe masses and comparable densities of the walk distribution at a
/// rescaled time.
#[derive(Debug, Clone, Serialize)]
pub struct KernelEstimate {
    pub t: f64,
    pub steps: u64,
    pub mode: KernelMode,
    pub masses: Vec<f64>,
    pub densities: Vec<f64>,
    /// Monte Carlo standard errors of the masses; zeros in exact mode.
    pub std_errors: Vec<f64>,
    pub probe_hash: String,
}

/// Walk steps corresponding to rescaled time `t` on a level-m graph:
/// `floor(d l^2 t)` at level 1 (taken verbatim), and
/// `round(d l^2 (rho N)^(m-1) t)` deeper. Zero steps is an error.
pub fn kernel_steps(spec: &GasketSpec, rho: f64, t: f64) -> Result<u64> {
    if !(t > 0.0) {
        return Err(LabError::InvalidInput(format!("time {t} must be positive")));
    }
    let d = spec.dimension as f64;
    let l = spec.side as f64;
    let n_cells = spec.cells_per_level()? as f64;
    let m = spec.level;
    if m == 0 {
        return Err(LabError::InvalidInput(
            "kernel experiments need level >= 1".into(),
        ));
    }
    let raw = if m == 1 {
        (d * l * l * t).floor()
    } else {
        (d * l * l * (rho * n_cells).powi(m as i32 - 1) * t).round()
    };
    if raw < 1.0 {
        return Err(LabError::BelowResolution { t });
    }
    Ok(raw as u64)
}

/// Steps for the dense reference lattice: `floor(d L^2 t)`.
pub fn reference_steps(d: u32, side: u32, t: f64) -> Result<u64> {
    let raw = (d as f64 * (side as f64).powi(2) * t).floor();
    if raw < 1.0 {
        return Err(LabError::BelowResolution { t });
    }
    Ok(raw as u64)
}

/// Kernel estimate on the level-m approximation of `spec` at rescaled time t,
/// from the given start vertex. Exact mode evolves the distribution; MC mode
/// samples endpoints under `config`.
pub fn kernel_estimate(
    spec: &GasketSpec,
    rho: f64,
    t: f64,
    ctx: &KernelContext,
    mode: KernelMode,
    start: Option<usize>,
    config: Option<&SimConfig>,
) -> Result<KernelEstimate> {
    let graph = Arc::new(kernel_graph(spec)?);
    let steps = kernel_steps(spec, rho, t)?;
    let model = WalkModel::simple(graph.clone())?;
    let start = start.unwrap_or(graph.boundary[0]);
    // mass is histogrammed into finest cells (shared corners split equally)
    // and probed at cell barycenters, matching the reference normalizers
    let positions = cell_positions(&graph);
    match mode {
        KernelMode::Exact => {
            let mass = evolve(
                &model,
                &MassVector::point(graph.vertex_count(), start)?,
                steps,
            );
            let masses = ctx
                .probes
                .masses(&positions, &cell_mass_histogram(&graph, &mass.values));
            Ok(KernelEstimate {
                t,
                steps,
                mode,
                densities: ctx.densities(&masses),
                std_errors: vec![0.0; masses.len()],
                masses,
                probe_hash: ctx.probes.content_hash(),
            })
        }
        KernelMode::Mc => {
            let config = config.ok_or_else(|| {
                LabError::InvalidInput("MC kernel estimates need a simulation config".into())
            })?;
            let report = endpoint_distribution(&model, config, start, steps)?;
            let masses = ctx.probes.masses(
                &positions,
                &cell_mass_histogram(&graph, &report.frequencies),
            );
            let std_errors = masses
                .iter()
                .map(|&p| {
                    (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / config.samples as f64).sqrt()
                })
                .collect();
            Ok(KernelEstimate {
                t,
                steps,
                mode,
                densities: ctx.densities(&masses),
                std_errors,
                masses,
                probe_hash: ctx.probes.content_hash(),
            })
        }
    }
}

/// Exact kernel of the dense simplex-lattice walk at `floor(d L^2 t)` steps;
/// the reference the gasket kernels are compared against.
pub fn reference_kernel(
    d: u32,
    side: u32,
    t: f64,
    ctx: &KernelContext,
    start: Option<usize>,
) -> Result<KernelEstimate> {
    let graph = Arc::new(lattice_graph(d, side)?);
    let steps = reference_steps(d, side, t)?;
    let model = WalkModel::simple(graph.clone())?;
    let start = start.unwrap_or(graph.boundary[0]);
    let mass = evolve(
        &model,
        &MassVector::point(graph.vertex_count(), start)?,
        steps,
    );
    let positions = cell_positions(&graph);
    let masses = ctx
        .probes
        .masses(&positions, &cell_mass_histogram(&graph, &mass.values));
    Ok(KernelEstimate {
        t,
        steps,
        mode: KernelMode::Exact,
        densities: ctx.densities(&masses),
        std_errors: vec![0.0; masses.len()],
        masses,
        probe_hash: ctx.probes.content_hash(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub t: f64,
    pub max_abs_discrepancy: f64,
    pub mean_abs_discrepancy: f64,
}

/// Probe-density discrepancy between a gasket kernel and the dense-lattice
/// reference over a list of times; the headline statistic is the max over
/// probes and times.
#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub d: u32,
    pub l: u32,
    pub m: u32,
    pub reference_side: u32,
    pub rows: Vec<CompareRow>,
    pub headline: f64,
    pub probe_hash: String,
}

pub fn compare_kernels(
    spec: &GasketSpec,
    rho: f64,
    t_list: &[f64],
    ctx: &KernelContext,
) -> Result<CompareReport> {
    compare_kernels_from(spec, rho, t_list, ctx, None)
}

/// Index of the vertex nearest to a point of the embedding.
pub fn nearest_vertex(graph: &gasket_geometry::ApproxGraph, point: &[f64]) -> usize {
    let positions = graph.euclidean_positions();
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (i, p) in positions.iter().enumerate() {
        let d: f64 = p
            .iter()
            .zip(point.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Comparison anchored at an arbitrary point: both walks start from their
/// graph's vertex nearest to the anchor (the corner at the origin when None).
pub fn compare_kernels_from(
    spec: &GasketSpec,
    rho: f64,
    t_list: &[f64],
    ctx: &KernelContext,
    anchor: Option<&[f64]>,
) -> Result<CompareReport> {
    if t_list.is_empty() {
        return Err(LabError::InvalidInput("empty time list".into()));
    }
    let starts = match anchor {
        None => (None, None),
        Some(point) => {
            let gasket_graph = kernel_graph(spec)?;
            let ref_graph = lattice_graph(ctx.dimension, ctx.reference_side)?;
            (
                Some(nearest_vertex(&gasket_graph, point)),
                Some(nearest_vertex(&ref_graph, point)),
            )
        }
    };
    let mut rows = Vec::with_capacity(t_list.len());
    let mut headline = 0.0f64;
    for &t in t_list {
        let gasket = kernel_estimate(spec, rho, t, ctx, KernelMode::Exact, starts.0, None)?;
        let reference = reference_kernel(ctx.dimension, ctx.reference_side, t, ctx, starts.1)?;
        let mut max_abs = 0.0f64;
        let mut sum_abs = 0.0f64;
        for (g, r) in gasket.densities.iter().zip(reference.densities.iter()) {
            let d = (g - r).abs();
            max_abs = max_abs.max(d);
            sum_abs += d;
        }
        headline = headline.max(max_abs);
        rows.push(CompareRow {
            t,
            max_abs_discrepancy: max_abs,
            mean_abs_discrepancy: sum_abs / gasket.densities.len() as f64,
        });
    }
    Ok(CompareReport {
        d: spec.dimension,
        l: spec.side,
        m: spec.level,
        reference_side: ctx.reference_side,
        rows,
        headline,
        probe_hash: ctx.probes.content_hash(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_counts_follow_the_time_scaling() {
        let spec1 = GasketSpec::sg(2, 2, 1).unwrap();
        assert_eq!(kernel_steps(&spec1, 5.0 / 3.0, 1.0).unwrap(), 8);
        let spec2 = GasketSpec::sg(2, 2, 2).unwrap();
        // d l^2 (rho N)^(m-1) t = 2*4*5*1
        assert_eq!(kernel_steps(&spec2, 5.0 / 3.0, 1.0).unwrap(), 40);
        assert!(matches!(
            kernel_steps(&spec1, 5.0 / 3.0, 1e-3),
            Err(LabError::BelowResolution { .. })
        ));
        assert_eq!(reference_steps(2, 64, 1.0).unwrap(), 8192);
    }

    #[test]
    fn identical_model_comparison_is_zero() {
        let ctx =
            KernelContext::simplex(ProbeSet::default_for_dimension(2).unwrap(), 2, 16).unwrap();
        let a = reference_kernel(2, 16, 0.5, &ctx, None).unwrap();
        let b = reference_kernel(2, 16, 0.5, &ctx, None).unwrap();
        for (x, y) in a.densities.iter().zip(b.densities.iter()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn long_time_reference_approaches_stationarity() {
        let ctx =
            KernelContext::simplex(ProbeSet::default_for_dimension(2).unwrap(), 2, 24).unwrap();
        let est = reference_kernel(2, 24, 40.0, &ctx, None).unwrap();
        // interior probes approach the degree-stationary profile; compare
        // against the exact stationary masses rather than a flat profile
        let graph = Arc::new(lattice_graph(2, 24).unwrap());
        let model = WalkModel::simple(graph.clone()).unwrap();
        let pi = model.stationary();
        let positions = cell_positions(&graph);
        let pi_masses = ctx
            .probes
            .masses(&positions, &cell_mass_histogram(&graph, &pi.values));
        for (i, (&m, &pm)) in est.masses.iter().zip(pi_masses.iter()).enumerate() {
            assert!(
                (m - pm).abs() < 0.01 * pm.max(1e-6),
                "probe {i}: {m} vs stationary {pm}"
            );
        }
    }

    #[test]
    fn exact_masses_over_partition_sum_to_one() {
        let probes =
            ProbeSet::simplex_cell_probes(2, 4, 0.1, crate::ProbeMembership::NearestCenter)
                .unwrap();
        let ctx = KernelContext::simplex(probes, 2, 32).unwrap();
        let spec = GasketSpec::sg(2, 3, 1).unwrap();
        let est = kernel_estimate(
            &spec,
            2.142857142857143,
            0.5,
            &ctx,
            KernelMode::Exact,
            None,
            None,
        )
        .unwrap();
        let total: f64 = est.masses.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "total {total}");
    }
}
