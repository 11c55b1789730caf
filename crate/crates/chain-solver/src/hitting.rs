use std::sync::Arc;

use gasket_geometry::{build_graph, ConductanceScheme, GasketSpec};
use network_resistance::solve::{Csr, GroundedSolver, GroundedSystem};
use serde::Serialize;

use crate::{ChainError, Result, WalkModel};

/// Exact first and second hitting-time moments plus the harmonic measure of
/// the target set.
#[derive(Debug, Clone, Serialize)]
pub struct HittingReport {
    pub start: usize,
    pub targets: Vec<usize>,
    pub expected_steps: f64,
    pub second_moment: f64,
    pub variance: f64,
    /// (target, probability that the walk first hits the target set there).
    pub hit_distribution: Vec<(usize, f64)>,
}

/// First and second moments of the hitting time of `targets` from `start`,
/// solved through the grounded Laplacian. The second moment follows the
/// one-step recurrence S_x = sum_y P(x,y) (1 + 2 E_y + S_y) as a second linear
/// system, and holding probabilities are handled analytically.
pub fn hitting_moments(
    model: &WalkModel,
    start: usize,
    targets: &[usize],
) -> Result<HittingReport> {
    let n = model.vertex_count();
    if start >= n || targets.iter().any(|&t| t >= n) {
        return Err(ChainError::InvalidInput("vertex index out of range".into()));
    }
    if targets.is_empty() {
        return Err(ChainError::UnreachableTarget);
    }
    let mut is_target = vec![false; n];
    for &t in targets {
        is_target[t] = true;
    }
    if is_target[start] {
        return Ok(HittingReport {
            start,
            targets: targets.to_vec(),
            expected_steps: 0.0,
            second_moment: 0.0,
            variance: 0.0,
            hit_distribution: targets
                .iter()
                .map(|&t| (t, (t == start) as u8 as f64))
                .collect(),
        });
    }

    // restrict to the component of the start
    let comp = component_of(model, start);
    if !targets.iter().any(|&t| comp[t]) {
        return Err(ChainError::UnreachableTarget);
    }
    let alpha = model.kind.hold_probability();
    let edges: Vec<(usize, usize, f64)> = model
        .graph
        .edges
        .iter()
        .map(|e| (e.u, e.v, e.conductance))
        .collect();
    let csr = Csr::from_edges(n, &edges);
    let free: Vec<usize> = (0..n).filter(|&v| comp[v] && !is_target[v]).collect();
    let sys = GroundedSystem::new(&csr, free.clone());
    let solver = GroundedSolver::new(&sys)?;

    // first moment: (D - C) E = deg / (1 - alpha)
    let rhs1: Vec<f64> = free
        .iter()
        .map(|&v| model.degree[v] / (1.0 - alpha))
        .collect();
    let expected = solver.solve(&rhs1)?;

    // second moment: (D - C) S = deg (1 + 2 alpha E) / (1 - alpha) + 2 C E
    let mut rhs2 = vec![0.0; free.len()];
    for (i, &v) in free.iter().enumerate() {
        let e_v = expected[i];
        let mut ce = 0.0;
        for &(w, c) in &model.neighbors[v] {
            let j = sys.local[w];
            if j != usize::MAX {
                ce += c * expected[j];
            }
        }
        rhs2[i] = model.degree[v] * (1.0 + 2.0 * alpha * e_v) / (1.0 - alpha) + 2.0 * ce;
    }
    let second = solver.solve(&rhs2)?;

    // harmonic measure: one grounded solve per target, shared factorization
    let mut hit_distribution = Vec::with_capacity(targets.len());
    for &t in targets {
        let mut rhs = vec![0.0; free.len()];
        for &(w, c) in &model.neighbors[t] {
            let j = sys.local[w];
            if j != usize::MAX {
                rhs[j] += c;
            }
        }
        let h = solver.solve(&rhs)?;
        hit_distribution.push((t, h[sys.local[start]]));
    }
    let mass: f64 = hit_distribution.iter().map(|(_, p)| p).sum();
    if (mass - 1.0).abs() > 1e-12 {
        return Err(ChainError::InvalidInput(format!(
            "harmonic measure sums to {mass}; target set may be unreachable from part of the component"
        )));
    }

    let e = expected[sys.local[start]];
    let s = second[sys.local[start]];
    Ok(HittingReport {
        start,
        targets: targets.to_vec(),
        expected_steps: e,
        second_moment: s,
        variance: s - e * e,
        hit_distribution,
    })
}

fn component_of(model: &WalkModel, start: usize) -> Vec<bool> {
    let mut seen = vec![false; model.vertex_count()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &(w, _) in &model.neighbors[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Symmetry identities of the corner-to-boundary crossing on a level-m gasket
/// graph with unit conductances: uniform harmonic measure over the far
/// corners, the 1/d mean ratio between the one-corner and any-corner hitting
/// times, and the (d-1)/d overshoot probability.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryIdentityReport {
    pub d: u32,
    pub l: u32,
    pub m: u32,
    pub hit_distribution: Vec<f64>,
    pub max_uniformity_deviation: f64,
    pub mean_any_corner: f64,
    pub mean_single_corner: f64,
    pub mean_ratio_deviation: f64,
    pub overshoot_probability: f64,
    pub overshoot_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn boundary_identity_check(d: u32, l: u32, m: u32) -> Result<BoundaryIdentityReport> {
    let tolerance = 1e-9;
    let spec = GasketSpec::sg(d, l, m)?;
    let graph = Arc::new(build_graph(&spec, ConductanceScheme::SgUnit)?);
    let model = WalkModel::simple(graph.clone())?;
    let boundary = graph.boundary.clone();
    let start = boundary[0];
    let others: Vec<usize> = boundary[1..].to_vec();

    let any = hitting_moments(&model, start, &others)?;
    let single = hitting_moments(&model, start, &[others[0]])?;

    let uniform = 1.0 / d as f64;
    let hit_distribution: Vec<f64> = any.hit_distribution.iter().map(|&(_, p)| p).collect();
    let max_uniformity_deviation = hit_distribution
        .iter()
        .map(|p| (p - uniform).abs())
        .fold(0.0f64, f64::max);

    let mean_ratio_deviation =
        (any.expected_steps - single.expected_steps / d as f64).abs() / any.expected_steps;

    // P(single-corner time exceeds the any-corner time) = 1 - weight of that corner
    let overshoot_probability = 1.0 - hit_distribution[0];
    let overshoot_target = (d as f64 - 1.0) / d as f64;
    let overshoot_deviation = (overshoot_probability - overshoot_target).abs();

    let pass = max_uniformity_deviation <= tolerance
        && mean_ratio_deviation <= tolerance
        && overshoot_deviation <= tolerance;
    Ok(BoundaryIdentityReport {
        d,
        l,
        m,
        hit_distribution,
        max_uniformity_deviation,
        mean_any_corner: any.expected_steps,
        mean_single_corner: single.expected_steps,
        mean_ratio_deviation,
        overshoot_probability,
        overshoot_deviation,
        tolerance,
        pass,
    })
}

/// Mean, variance and relative fluctuation of the corner-to-boundary crossing
/// time on a level-m gasket graph, plus the per-step time calibration that
/// puts the mean crossing at 1/(2d) diffusion time units.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingStats {
    pub d: u32,
    pub l: u32,
    pub m: u32,
    pub mean: f64,
    pub variance: f64,
    /// variance / mean^2
    pub ratio: f64,
    /// diffusion time per walk step: 1 / (2 d * mean)
    pub time_per_step: f64,
}

pub fn crossing_time_stats(d: u32, l: u32, m: u32) -> Result<CrossingStats> {
    let spec = GasketSpec::sg(d, l, m)?;
    let graph = Arc::new(build_graph(&spec, ConductanceScheme::SgUnit)?);
    let model = WalkModel::simple(graph.clone())?;
    let boundary = graph.boundary.clone();
    let report = hitting_moments(&model, boundary[0], &boundary[1..])?;
    let mean = report.expected_steps;
    let variance = report.variance;
    Ok(CrossingStats {
        d,
        l,
        m,
        mean,
        variance,
        ratio: variance / (mean * mean),
        time_per_step: 1.0 / (2.0 * d as f64 * mean),
    })
}
