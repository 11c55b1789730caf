use network_resistance::solve::{Csr, GroundedSystem};
use network_resistance::ScaleFunction;
use serde::Serialize;

use crate::{ChainError, Result, WalkModel};

/// Converts exit step counts to diffusion time and compares against the
/// crossover profile.
#[derive(Debug, Clone, Copy)]
pub struct ExitScaling {
    pub time_per_step: f64,
    pub scale: ScaleFunction,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExitRow {
    pub radius: f64,
    pub ball_size: usize,
    pub max_expected_steps: f64,
    pub max_expected_time: Option<f64>,
    /// time / Psi(radius), when a scaling is supplied
    pub psi_ratio: Option<f64>,
}

/// Vertices within Euclidean distance `radius` of `center`, in the normalized
/// embedding of the graph.
pub fn ball_region(model: &WalkModel, center: &[f64], radius: f64) -> Vec<usize> {
    model
        .graph
        .euclidean_positions()
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let d2: f64 = p
                .iter()
                .zip(center.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d2.sqrt() <= radius
        })
        .map(|(i, _)| i)
        .collect()
}

/// For each radius, the worst-case expected number of steps to leave the ball,
/// over all starting vertices inside it. Exact grounded solves; one system per
/// radius covers every start.
pub fn exit_time_profile(
    model: &WalkModel,
    center: &[f64],
    radii: &[f64],
    scaling: Option<&ExitScaling>,
) -> Result<Vec<ExitRow>> {
    let n = model.vertex_count();
    let alpha = model.kind.hold_probability();
    let edges: Vec<(usize, usize, f64)> = model
        .graph
        .edges
        .iter()
        .map(|e| (e.u, e.v, e.conductance))
        .collect();
    let csr = Csr::from_edges(n, &edges);
    let mut rows = Vec::with_capacity(radii.len());
    for &radius in radii {
        if !(radius > 0.0) {
            return Err(ChainError::InvalidInput(format!(
                "radius {radius} must be positive"
            )));
        }
        let ball = ball_region(model, center, radius);
        if ball.is_empty() {
            return Err(ChainError::InvalidInput(format!(
                "no vertices within radius {radius} of {center:?}"
            )));
        }
        if ball.len() == n {
            return Err(ChainError::InfiniteExitTime);
        }
        let sys = GroundedSystem::new(&csr, ball.clone());
        let rhs: Vec<f64> = ball
            .iter()
            .map(|&v| model.degree[v] / (1.0 - alpha))
            .collect();
        let expected = sys.solve(&rhs)?;
        let max_steps = expected.iter().copied().fold(0.0f64, f64::max);
        let (time, ratio) = match scaling {
            Some(s) => {
                let t = max_steps * s.time_per_step;
                (Some(t), Some(t / s.scale.value(radius.min(1.0))?))
            }
            None => (None, None),
        };
        rows.push(ExitRow {
            radius,
            ball_size: ball.len(),
            max_expected_steps: max_steps,
            max_expected_time: time,
            psi_ratio: ratio,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use gasket_geometry::lattice_graph;

    use super::*;
    use crate::WalkModel;

    #[test]
    fn exit_times_grow_with_radius() {
        let model = WalkModel::simple(Arc::new(lattice_graph(2, 16).unwrap())).unwrap();
        let positions = model.graph.euclidean_positions();
        // barycenter of the simplex
        let center: Vec<f64> = (0..2)
            .map(|k| positions.iter().map(|p| p[k]).sum::<f64>() / positions.len() as f64)
            .collect();
        let rows = exit_time_profile(&model, &center, &[0.1, 0.2, 0.3], None).unwrap();
        assert!(rows[0].max_expected_steps <= rows[1].max_expected_steps);
        assert!(rows[1].max_expected_steps <= rows[2].max_expected_steps);
    }

    #[test]
    fn whole_graph_ball_is_an_error() {
        let model = WalkModel::simple(Arc::new(lattice_graph(2, 4).unwrap())).unwrap();
        let err = exit_time_profile(&model, &[0.5, 0.3], &[5.0], None);
        assert!(matches!(err, Err(ChainError::InfiniteExitTime)));
    }
}
