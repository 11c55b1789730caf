use gasket_geometry::ApproxGraph;
use serde::{Deserialize, Serialize};

use crate::{NetError, Result};

/// A weighted undirected graph with per-edge conductance, the input to every
/// linear-algebra operation in this crate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResistorNetwork {
    pub node_count: usize,
    /// (u, v, conductance), u != v, conductance > 0.
    pub edges: Vec<(usize, usize, f64)>,
    /// Optional distinguished node subset.
    pub boundary: Option<Vec<usize>>,
}

impl ResistorNetwork {
    pub fn new(node_count: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(u, v, c) in &edges {
            if u >= node_count || v >= node_count {
                return Err(NetError::InvalidInput(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if u == v {
                return Err(NetError::InvalidInput(format!("self-loop at node {u}")));
            }
            if !(c > 0.0) || !c.is_finite() {
                return Err(NetError::InvalidInput(format!(
                    "conductance {c} on edge ({u}, {v}) is not positive and finite"
                )));
            }
        }
        Ok(ResistorNetwork {
            node_count,
            edges,
            boundary: None,
        })
    }

    pub fn with_boundary(mut self, boundary: Vec<usize>) -> Self {
        self.boundary = Some(boundary);
        self
    }

    pub fn from_graph(graph: &ApproxGraph) -> Self {
        ResistorNetwork {
            node_count: graph.vertex_count(),
            edges: graph
                .edges
                .iter()
                .map(|e| (e.u, e.v, e.conductance))
                .collect(),
            boundary: Some(graph.boundary.clone()),
        }
    }

    /// Complete graph on `n` nodes with uniform conductance.
    pub fn complete(n: usize, conductance: f64) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v, conductance));
            }
        }
        ResistorNetwork {
            node_count: n,
            edges,
            boundary: None,
        }
    }

    /// Path 0 - 1 - ... - n-1 with uniform conductance.
    pub fn path(n: usize, conductance: f64) -> Self {
        ResistorNetwork {
            node_count: n,
            edges: (0..n.saturating_sub(1))
                .map(|i| (i, i + 1, conductance))
                .collect(),
            boundary: None,
        }
    }

    /// Component label per node.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.node_count];
        let mut adj = vec![Vec::new(); self.node_count];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut next = 0;
        for start in 0..self.node_count {
            if label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = next;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    }
}
