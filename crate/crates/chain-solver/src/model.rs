use std::sync::Arc;

use gasket_geometry::ApproxGraph;
use serde::Serialize;

use crate::{ChainError, Result};

/// Walk flavor: transitions proportional to conductance, optionally holding in
/// place with a fixed probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WalkKind {
    Simple,
    /// Hold with probability `alpha` in [0, 1), otherwise step as the simple walk.
    Lazy(f64),
}

impl WalkKind {
    pub fn hold_probability(&self) -> f64 {
        match self {
            WalkKind::Simple => 0.0,
            WalkKind::Lazy(a) => *a,
        }
    }
}

/// A random walk on an approximation graph. Owns the neighbor structure so
/// repeated solves and simulations avoid rebuilding it.
pub struct WalkModel {
    pub graph: Arc<ApproxGraph>,
    pub kind: WalkKind,
    pub neighbors: Vec<Vec<(usize, f64)>>,
    pub degree: Vec<f64>,
}

impl WalkModel {
    pub fn new(graph: Arc<ApproxGraph>, kind: WalkKind) -> Result<Self> {
        if let WalkKind::Lazy(a) = kind {
            if !(0.0..1.0).contains(&a) {
                return Err(ChainError::InvalidInput(format!(
                    "lazy hold probability must lie in [0, 1), got {a}"
                )));
            }
        }
        let adj = graph.adjacency();
        if adj.degree.iter().any(|&d| d <= 0.0) {
            return Err(ChainError::InvalidInput(
                "walk model requires every vertex to have positive degree".into(),
            ));
        }
        Ok(WalkModel {
            kind,
            neighbors: adj.neighbors,
            degree: adj.degree,
            graph,
        })
    }

    pub fn simple(graph: Arc<ApproxGraph>) -> Result<Self> {
        Self::new(graph, WalkKind::Simple)
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Degree-proportional stationary distribution of the walk.
    pub fn stationary(&self) -> MassVector {
        let total: f64 = self.degree.iter().sum();
        MassVector {
            values: self.degree.iter().map(|&d| d / total).collect(),
        }
    }
}

/// Probability mass per vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassVector {
    pub values: Vec<f64>,
}

impl MassVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(ChainError::InvalidInput(
                "mass vector has negative or non-finite entries".into(),
            ));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ChainError::InvalidInput(format!(
                "mass vector sums to {sum}, expected 1"
            )));
        }
        Ok(MassVector { values })
    }

    pub fn point(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return Err(ChainError::InvalidInput(format!(
                "point mass index {at} out of range {len}"
            )));
        }
        let mut values = vec![0.0; len];
        values[at] = 1.0;
        Ok(MassVector { values })
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}
