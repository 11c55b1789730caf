use gasket_geometry::{
    enumerate_cells, lattice_graph, simplex_corners, ConductanceScheme, Family, GasketSpec,
};
use serde::{Deserialize, Serialize};

use crate::{LabError, Result};

/// How points are attributed to probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeMembership {
    /// A point belongs to every probe ball containing it.
    Ball,
    /// A point belongs to the probe with the nearest center (lowest index on
    /// ties); probes then partition space.
    NearestCenter,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Probe {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// A fixed, hashable family of probe regions used to compare distributions
/// across models.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeSet {
    pub membership: ProbeMembership,
    pub probes: Vec<Probe>,
}

impl ProbeSet {
    pub fn new(membership: ProbeMembership, probes: Vec<Probe>) -> Result<Self> {
        if probes.is_empty() {
            return Err(LabError::InvalidInput("probe set is empty".into()));
        }
        for p in &probes {
            if !(p.radius > 0.0) || p.center.iter().any(|c| !c.is_finite()) {
                return Err(LabError::InvalidInput(
                    "probe with bad center or radius".into(),
                ));
            }
        }
        Ok(ProbeSet { membership, probes })
    }

    /// The default probe family for the simplex models in dimension d: one
    /// ball of radius 0.1 at the barycenter of each upward cell of a side-4
    /// subdivision.
    pub fn default_for_dimension(d: u32) -> Result<Self> {
        Self::simplex_cell_probes(d, 4, 0.1, ProbeMembership::Ball)
    }

    /// Finer, overlapping probe family for modulus-of-continuity checks:
    /// probe pairs exist down to center distance 1/10.
    pub fn holder_for_dimension(d: u32) -> Result<Self> {
        Self::simplex_cell_probes(d, 10, 0.06, ProbeMembership::Ball)
    }

    /// Probes at the barycenters of the upward cells of a side-k subdivision.
    pub fn simplex_cell_probes(
        d: u32,
        k: u32,
        radius: f64,
        membership: ProbeMembership,
    ) -> Result<Self> {
        let spec = GasketSpec::sg(d, k, 1)?;
        let corners = simplex_corners(d as usize);
        let mut probes = Vec::new();
        for word in enumerate_cells(&spec)? {
            let cell_corners = gasket_geometry::cell_corners(&word, &spec)?;
            let mut center = vec![0.0f64; d as usize];
            for c in &cell_corners {
                let weights: Vec<f64> = c.coords.iter().map(|&x| x as f64 / k as f64).collect();
                let p = gasket_geometry::barycentric_to_euclidean(&weights, &corners);
                for (ci, pi) in center.iter_mut().zip(p.iter()) {
                    *ci += pi / cell_corners.len() as f64;
                }
            }
            probes.push(Probe { center, radius });
        }
        Self::new(membership, probes)
    }

    /// Probe index (or indices) a point belongs to.
    pub fn assign(&self, point: &[f64]) -> Vec<usize> {
        match self.membership {
            ProbeMembership::Ball => self
                .probes
                .iter()
                .enumerate()
                .filter(|(_, p)| distance(&p.center, point) <= p.radius)
                .map(|(i, _)| i)
                .collect(),
            ProbeMembership::NearestCenter => {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for (i, p) in self.probes.iter().enumerate() {
                    let d = distance(&p.center, point);
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                vec![best]
            }
        }
    }

    /// Per-probe mass of a weighted point cloud.
    pub fn masses(&self, positions: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0f64; self.probes.len()];
        for (pos, &w) in positions.iter().zip(weights.iter()) {
            if w == 0.0 {
                continue;
            }
            for i in self.assign(pos) {
                out[i] += w;
            }
        }
        out
    }

    /// Fraction of fine simplex-lattice cells whose barycenter falls in each
    /// probe; the normalizer that turns probe masses into comparable
    /// densities. Cell barycenters are the same carrier used to histogram
    /// walk mass, so the discretizations match.
    pub fn reference_fractions_simplex(&self, d: u32, fine_side: u32) -> Result<Vec<f64>> {
        let lat = lattice_graph(d, fine_side)?;
        let positions = cell_positions(&lat);
        let uniform = vec![1.0 / positions.len() as f64; positions.len()];
        let fractions = self.masses(&positions, &uniform);
        self.check_fractions(&fractions)?;
        Ok(fractions)
    }

    /// Fraction of fine cubic-grid cells centered in each probe (Vicsek
    /// carrier).
    pub fn reference_fractions_grid(&self, d: u32, fine_side: u32) -> Result<Vec<f64>> {
        let mut positions = Vec::new();
        let mut idx = vec![0u32; d as usize];
        loop {
            positions.push(
                idx.iter()
                    .map(|&i| (i as f64 + 0.5) / fine_side as f64)
                    .collect::<Vec<f64>>(),
            );
            let mut k = d as usize;
            loop {
                if k == 0 {
                    let uniform = vec![1.0 / positions.len() as f64; positions.len()];
                    let fractions = self.masses(&positions, &uniform);
                    self.check_fractions(&fractions)?;
                    return Ok(fractions);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < fine_side {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn check_fractions(&self, fractions: &[f64]) -> Result<()> {
        if let Some(i) = fractions.iter().position(|&f| f == 0.0) {
            return Err(LabError::InvalidInput(format!(
                "probe {i} contains no reference lattice sites; shrink the probe set or refine the lattice"
            )));
        }
        Ok(())
    }

    /// FNV-1a content hash over the canonical probe serialization; embedded in
    /// reports so probe families can be compared across runs.
    pub fn content_hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x1000_0000_01b3);
            }
        };
        eat(match self.membership {
            ProbeMembership::Ball => b"ball",
            ProbeMembership::NearestCenter => b"nearest",
        });
        for p in &self.probes {
            for c in &p.center {
                eat(&c.to_bits().to_le_bytes());
            }
            eat(&p.radius.to_bits().to_le_bytes());
        }
        format!("{h:016x}")
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }
}

/// Probe masses of a vertex distribution under the cell-histogram
/// attribution used throughout the kernel experiments.
pub fn probe_cell_masses(
    graph: &gasket_geometry::ApproxGraph,
    probes: &ProbeSet,
    vertex_mass: &[f64],
) -> Vec<f64> {
    probes.masses(
        &cell_positions(graph),
        &cell_mass_histogram(graph, vertex_mass),
    )
}

/// Barycenter of every finest cell, in the embedding the probes live in.
pub(crate) fn cell_positions(graph: &gasket_geometry::ApproxGraph) -> Vec<Vec<f64>> {
    let positions = graph.euclidean_positions();
    let d = positions[0].len();
    let mut centers = vec![vec![0.0f64; d]; graph.cells.len()];
    let mut counts = vec![0usize; graph.cells.len()];
    for (v, cells) in graph.cell_membership.iter().enumerate() {
        for &c in cells {
            for (acc, x) in centers[c].iter_mut().zip(positions[v].iter()) {
                *acc += x;
            }
            counts[c] += 1;
        }
    }
    for (center, count) in centers.iter_mut().zip(counts.iter()) {
        for x in center.iter_mut() {
            *x /= *count as f64;
        }
    }
    centers
}

/// Histograms vertex mass into the finest cells: a vertex's mass splits
/// equally among its incident cells.
pub(crate) fn cell_mass_histogram(
    graph: &gasket_geometry::ApproxGraph,
    vertex_mass: &[f64],
) -> Vec<f64> {
    let mut out = vec![0.0f64; graph.cells.len()];
    for (v, cells) in graph.cell_membership.iter().enumerate() {
        let share = vertex_mass[v] / cells.len() as f64;
        for &c in cells {
            out[c] += share;
        }
    }
    out
}

/// Builds the level-m gasket walk graph used by kernel experiments.
pub(crate) fn kernel_graph(spec: &GasketSpec) -> Result<gasket_geometry::ApproxGraph> {
    let scheme = match spec.family {
        Family::Sg => ConductanceScheme::SgUnit,
        Family::Vs2d => ConductanceScheme::Vs2d { diagonal: 1.0 },
        Family::Vs3d => ConductanceScheme::Vs3d {
            face: 1.0,
            long: 1.0,
        },
    };
    Ok(gasket_geometry::build_graph(spec, scheme)?)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
