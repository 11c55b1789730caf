use gasket_geometry::ApproxGraph;
use nalgebra::DMatrix;

use crate::{ChainError, Result};

/// Node-count cap for the dense eigensolve.
const EIGEN_LIMIT: usize = 4000;

/// The smallest constant C with `sum_v (f(v) - mean f)^2 <= C * energy(f)` over
/// the region with its induced edges, i.e. the reciprocal of the smallest
/// positive eigenvalue of the induced (Neumann) Laplacian under the uniform
/// vertex measure.
pub fn poincare_constant(graph: &ApproxGraph, region: &[usize]) -> Result<f64> {
    let nr = region.len();
    if nr < 2 {
        return Err(ChainError::InvalidInput(
            "poincare constant needs at least two vertices".into(),
        ));
    }
    if nr > EIGEN_LIMIT {
        return Err(ChainError::Guard(format!(
            "dense eigensolve limited to {EIGEN_LIMIT} vertices, got {nr}"
        )));
    }
    let mut local = vec![usize::MAX; graph.vertex_count()];
    for (i, &v) in region.iter().enumerate() {
        if v >= graph.vertex_count() {
            return Err(ChainError::InvalidInput(format!("vertex {v} out of range")));
        }
        if local[v] != usize::MAX {
            return Err(ChainError::InvalidInput(format!(
                "duplicate region vertex {v}"
            )));
        }
        local[v] = i;
    }

    let mut lap = DMatrix::<f64>::zeros(nr, nr);
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); nr];
    let mut max_degree = 0.0f64;
    for e in &graph.edges {
        let (iu, iv) = (local[e.u], local[e.v]);
        if iu == usize::MAX || iv == usize::MAX {
            continue;
        }
        lap[(iu, iv)] -= e.conductance;
        lap[(iv, iu)] -= e.conductance;
        lap[(iu, iu)] += e.conductance;
        lap[(iv, iv)] += e.conductance;
        adjacency[iu].push(iv);
        adjacency[iv].push(iu);
        max_degree = max_degree.max(lap[(iu, iu)]).max(lap[(iv, iv)]);
    }

    // connectivity of the induced subgraph
    let mut seen = vec![false; nr];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    if count != nr {
        return Err(ChainError::DisconnectedRegion);
    }

    let eigen = lap.symmetric_eigenvalues();
    let mut values: Vec<f64> = eigen.iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    // the kernel of a connected region is one constant mode
    let cutoff = 1e-9 * max_degree.max(1.0);
    let lambda1 = values
        .iter()
        .copied()
        .find(|&v| v > cutoff)
        .ok_or_else(|| ChainError::InvalidInput("no positive eigenvalue found".into()))?;
    Ok(1.0 / lambda1)
}
