use crate::solve::{Csr, GroundedSolver, GroundedSystem, DENSE_LIMIT};
use crate::{NetError, ResistorNetwork, Result};

/// Relative magnitude below which traced off-diagonal entries are dropped.
const SCHUR_DROP: f64 = 1e-13;

/// Effective resistance between two nodes: the reciprocal of the minimal
/// Dirichlet energy over potentials pinned to 0 at `a` and 1 at `b`, computed
/// by solving the Laplacian system with `a` grounded.
pub fn effective_resistance(net: &ResistorNetwork, a: usize, b: usize) -> Result<f64> {
    if a >= net.node_count || b >= net.node_count {
        return Err(NetError::InvalidInput(format!(
            "node out of range: ({a}, {b}) on {} nodes",
            net.node_count
        )));
    }
    if a == b {
        return Err(NetError::InvalidInput(
            "effective resistance needs two distinct nodes".into(),
        ));
    }
    let comps = net.components();
    if comps[a] != comps[b] {
        return Err(NetError::DisconnectedPair(a, b));
    }
    let free: Vec<usize> = (0..net.node_count)
        .filter(|&v| v != a && comps[v] == comps[a])
        .collect();
    let csr = Csr::from_edges(net.node_count, &net.edges);
    let sys = GroundedSystem::new(&csr, free);
    let mut rhs = vec![0.0; sys.len()];
    rhs[sys.local[b]] = 1.0;
    let x = sys.solve(&rhs)?;
    Ok(x[sys.local[b]])
}

/// All-pairs effective resistance on one connected network, via the inverse of
/// the Laplacian grounded at node 0.
pub fn all_pairs_resistance(net: &ResistorNetwork) -> Result<Vec<Vec<f64>>> {
    let n = net.node_count;
    if n > DENSE_LIMIT {
        return Err(NetError::Guard(format!(
            "all-pairs resistance limited to {DENSE_LIMIT} nodes, got {n}"
        )));
    }
    let comps = net.components();
    if comps.iter().any(|&c| c != 0) {
        return Err(NetError::InvalidInput(
            "all-pairs resistance needs a connected network".into(),
        ));
    }
    let csr = Csr::from_edges(n, &net.edges);
    let free: Vec<usize> = (1..n).collect();
    let sys = GroundedSystem::new(&csr, free);
    let solver = GroundedSolver::new(&sys)?;
    // columns of the grounded inverse
    let mut inv = vec![vec![0.0f64; n]; n]; // inv[v][w], grounded row/col 0 stays zero
    for v in 1..n {
        let mut rhs = vec![0.0; n - 1];
        rhs[sys.local[v]] = 1.0;
        let x = solver.solve(&rhs)?;
        for w in 1..n {
            inv[v][w] = x[sys.local[w]];
        }
    }
    let mut r = vec![vec![0.0f64; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let val = inv[a][a] + inv[b][b] - inv[a][b] - inv[b][a];
            r[a][b] = val;
            r[b][a] = val;
        }
    }
    Ok(r)
}

/// Reduces a network onto a node subset, preserving all boundary pairwise
/// effective resistances: the Schur complement of the weighted Laplacian onto
/// `boundary`. Nodes of the result are renumbered in `boundary` order.
pub fn schur_trace(net: &ResistorNetwork, boundary: &[usize]) -> Result<ResistorNetwork> {
    let n = net.node_count;
    if boundary.is_empty() {
        return Err(NetError::InvalidInput("empty boundary".into()));
    }
    let mut is_boundary = vec![false; n];
    for &b in boundary {
        if b >= n {
            return Err(NetError::InvalidInput(format!(
                "boundary node {b} out of range"
            )));
        }
        if is_boundary[b] {
            return Err(NetError::InvalidInput(format!(
                "duplicate boundary node {b}"
            )));
        }
        is_boundary[b] = true;
    }
    let interior: Vec<usize> = (0..n).filter(|&v| !is_boundary[v]).collect();
    if interior.is_empty() {
        return Err(NetError::InvalidInput(
            "boundary must be strictly contained in the nodes".into(),
        ));
    }

    // every interior component must touch the boundary, else L_II is singular
    let comps = net.components();
    let mut comp_touches = std::collections::HashMap::new();
    for &b in boundary {
        comp_touches.insert(comps[b], true);
    }
    for &v in &interior {
        if !comp_touches.contains_key(&comps[v]) {
            return Err(NetError::SingularInterior);
        }
    }

    let csr = Csr::from_edges(n, &net.edges);
    let sys = GroundedSystem::new(&csr, interior.clone());
    let solver = GroundedSolver::new(&sys)?;
    let nb = boundary.len();
    let mut local_boundary = vec![usize::MAX; n];
    for (i, &b) in boundary.iter().enumerate() {
        local_boundary[b] = i;
    }

    // S = L_BB - L_BI L_II^{-1} L_IB, one interior solve per boundary column
    let mut s = vec![vec![0.0f64; nb]; nb];
    for (bi, &b) in boundary.iter().enumerate() {
        s[bi][bi] = csr.degree[b];
        for (w, c) in csr.neighbors(b) {
            let bj = local_boundary[w];
            if bj != usize::MAX {
                s[bi][bj] -= c;
            }
        }
        // column of L_IB for this boundary node
        let mut col = vec![0.0; sys.len()];
        let mut nonzero = false;
        for (w, c) in csr.neighbors(b) {
            let li = sys.local[w];
            if li != usize::MAX {
                col[li] -= c;
                nonzero = true;
            }
        }
        if !nonzero {
            continue;
        }
        let y = solver.solve(&col)?;
        // accumulate -L_BI y into column bi of S
        for (li, &v) in interior.iter().enumerate() {
            let yi = y[li];
            if yi == 0.0 {
                continue;
            }
            for (w, c) in csr.neighbors(v) {
                let bj = local_boundary[w];
                if bj != usize::MAX {
                    s[bj][bi] += c * yi;
                }
            }
        }
    }

    let max_c = net.edges.iter().map(|&(_, _, c)| c).fold(0.0f64, f64::max);
    let drop_below = SCHUR_DROP * max_c;
    let mut edges = Vec::new();
    for u in 0..nb {
        for v in (u + 1)..nb {
            let c = -0.5 * (s[u][v] + s[v][u]);
            if c.abs() < drop_below {
                continue;
            }
            if c < 0.0 {
                return Err(NetError::NumericalFailure(format!(
                    "trace produced negative conductance {c:.3e} between boundary nodes {u} and {v}"
                )));
            }
            edges.push((u, v, c));
        }
    }
    ResistorNetwork::new(nb, edges)
}
