use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cells::{cell_corners, enumerate_cells, single_letters, BaryVertex, CellWord};
use crate::embed::{barycentric_to_euclidean, simplex_corners};
use crate::{ConductanceScheme, Family, GasketSpec, GeometryError, Result};

/// Undirected weighted edge; `u < v` always holds after construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub conductance: f64,
}

/// A finest-level approximation graph: deduplicated vertices, per-cell complete
/// graphs with scheme conductances, boundary vertex indices and, for every
/// vertex, the list of finest cells it belongs to.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxGraph {
    pub spec: GasketSpec,
    pub scheme: ConductanceScheme,
    pub vertices: Vec<BaryVertex>,
    pub edges: Vec<Edge>,
    /// Indices of the 0-cell corner vertices, in canonical corner order.
    pub boundary: Vec<usize>,
    /// Finest-level cells in enumeration order.
    pub cells: Vec<CellWord>,
    /// For each vertex, indices into `cells` of the incident finest cells.
    pub cell_membership: Vec<Vec<usize>>,
}

impl ApproxGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Index lookup by exact coordinates.
    pub fn vertex_index(&self, coords: &[i64]) -> Option<usize> {
        self.vertices.iter().position(|v| v.coords == coords)
    }

    /// Normalized Euclidean positions: gasket vertices are embedded in the
    /// regular unit simplex (corner 0 at the origin), Vicsek vertices fill the
    /// unit square/cube.
    pub fn euclidean_positions(&self) -> Vec<Vec<f64>> {
        let scale = self
            .spec
            .coordinate_scale()
            .expect("scale checked during construction") as f64;
        match self.spec.family {
            Family::Sg => {
                let corners = simplex_corners(self.spec.dimension as usize);
                self.vertices
                    .iter()
                    .map(|v| {
                        let w: Vec<f64> = v.coords.iter().map(|&c| c as f64 / scale).collect();
                        barycentric_to_euclidean(&w, &corners)
                    })
                    .collect()
            }
            Family::Vs2d | Family::Vs3d => self
                .vertices
                .iter()
                .map(|v| v.coords.iter().map(|&c| c as f64 / scale).collect())
                .collect(),
        }
    }

    /// Neighbor lists with conductances, plus weighted degrees.
    pub fn adjacency(&self) -> Adjacency {
        let n = self.vertices.len();
        let mut neighbors = vec![Vec::new(); n];
        let mut degree = vec![0.0f64; n];
        for e in &self.edges {
            neighbors[e.u].push((e.v, e.conductance));
            neighbors[e.v].push((e.u, e.conductance));
            degree[e.u] += e.conductance;
            degree[e.v] += e.conductance;
        }
        Adjacency { neighbors, degree }
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Canonical relabeling by sorted coordinates; used to compare graphs that
    /// were constructed by different routes.
    pub fn canonical_form(&self) -> (Vec<Vec<i64>>, Vec<(usize, usize, f64)>) {
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| self.vertices[a].coords.cmp(&self.vertices[b].coords));
        let mut rank = vec![0usize; self.vertices.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let verts = order
            .iter()
            .map(|&i| self.vertices[i].coords.clone())
            .collect();
        let mut edges: Vec<(usize, usize, f64)> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (rank[e.u], rank[e.v]);
                (a.min(b), a.max(b), e.conductance)
            })
            .collect();
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        (verts, edges)
    }
}

/// Neighbor-list view of an [`ApproxGraph`].
pub struct Adjacency {
    pub neighbors: Vec<Vec<(usize, f64)>>,
    pub degree: Vec<f64>,
}

struct GraphBuilder {
    guard: u64,
    index: HashMap<Vec<i64>, usize>,
    vertices: Vec<BaryVertex>,
}

impl GraphBuilder {
    fn new(guard: u64) -> Self {
        GraphBuilder {
            guard,
            index: HashMap::new(),
            vertices: Vec::new(),
        }
    }

    fn intern(&mut self, v: BaryVertex) -> Result<usize> {
        if let Some(&i) = self.index.get(&v.coords) {
            return Ok(i);
        }
        if self.vertices.len() as u64 >= self.guard {
            return Err(GeometryError::MemoryGuard {
                actual: self.vertices.len() as u128 + 1,
                guard: self.guard as u128,
            });
        }
        let i = self.vertices.len();
        self.index.insert(v.coords.clone(), i);
        self.vertices.push(v);
        Ok(i)
    }
}

fn check_simplex_vertex(v: &BaryVertex, scale: i64) {
    debug_assert!(
        v.coords.iter().all(|&c| c >= 0) && v.coords.iter().sum::<i64>() == scale,
        "vertex {:?} left the closed simplex of scale {scale}",
        v.coords
    );
}

/// Builds the finest-level conductance graph for a spec: each finest cell
/// contributes the complete graph on its corners with scheme conductances, and
/// shared corners are merged by exact integer coordinates. Parallel edges from
/// distinct cells (which do not arise for these families) would merge by the
/// parallel law.
pub fn build_graph(spec: &GasketSpec, scheme: ConductanceScheme) -> Result<ApproxGraph> {
    spec.validate()?;
    scheme.check_for(spec)?;
    spec.check_guard()?;
    let scale = spec.coordinate_scale()?;
    let cells = enumerate_cells(spec)?;

    let mut builder = GraphBuilder::new(spec.vertex_guard);
    let mut edge_index: HashMap<(usize, usize), f64> = HashMap::new();
    let mut membership_pairs: Vec<(usize, usize)> = Vec::new(); // (vertex, cell)

    for (ci, word) in cells.iter().enumerate() {
        let corners = cell_corners(word, spec)?;
        if spec.family == Family::Sg {
            for c in &corners {
                check_simplex_vertex(c, scale);
            }
        }
        let ids: Vec<usize> = corners
            .into_iter()
            .map(|c| builder.intern(c))
            .collect::<Result<_>>()?;
        for (a, &u) in ids.iter().enumerate() {
            membership_pairs.push((u, ci));
            for &v in ids.iter().skip(a + 1) {
                let hamming = match spec.family {
                    Family::Sg => spec.dimension,
                    _ => {
                        let cu = &builder.vertices[u].coords;
                        let cv = &builder.vertices[v].coords;
                        cu.iter().zip(cv.iter()).filter(|(x, y)| x != y).count() as u32
                    }
                };
                let c = scheme.pair_conductance(spec.dimension, hamming);
                let key = (u.min(v), u.max(v));
                *edge_index.entry(key).or_insert(0.0) += c;
            }
        }
    }

    let mut edges: Vec<Edge> = edge_index
        .into_iter()
        .map(|((u, v), conductance)| Edge { u, v, conductance })
        .collect();
    edges.sort_by_key(|e| (e.u, e.v));

    let boundary = boundary_indices(spec, &builder)?;
    let mut cell_membership = vec![Vec::new(); builder.vertices.len()];
    for (v, c) in membership_pairs {
        cell_membership[v].push(c);
    }

    let graph = ApproxGraph {
        spec: spec.clone(),
        scheme,
        vertices: builder.vertices,
        edges,
        boundary,
        cells,
        cell_membership,
    };
    assert!(graph.is_connected(), "constructed graph is disconnected");
    Ok(graph)
}

fn boundary_indices(spec: &GasketSpec, builder: &GraphBuilder) -> Result<Vec<usize>> {
    let scale = spec.coordinate_scale()?;
    let coords_list: Vec<Vec<i64>> = match spec.family {
        Family::Sg => {
            let dp1 = spec.dimension as usize + 1;
            (0..dp1)
                .map(|i| {
                    let mut c = vec![0i64; dp1];
                    c[i] = scale;
                    c
                })
                .collect()
        }
        Family::Vs2d | Family::Vs3d => {
            let d = spec.dimension as usize;
            (0..1usize << d)
                .map(|bits| (0..d).map(|j| ((bits >> j) & 1) as i64 * scale).collect())
                .collect()
        }
    };
    coords_list
        .into_iter()
        .map(|c| {
            builder
                .index
                .get(&c)
                .copied()
                .ok_or_else(|| GeometryError::InvalidSpec(format!("missing boundary vertex {c:?}")))
        })
        .collect()
}

/// The full simplex lattice of mesh 1/L restricted to the closed simplex:
/// all integer barycentric points summing to `L`, with an edge between points
/// differing by `e_i - e_j` (unit conductance).
///
/// Coincides with `build_graph` of the level-1 gasket at side `L`, because
/// every nearest-neighbour pair lies in a common upward cell; the two routes
/// are compared in tests.
pub fn lattice_graph(d: u32, side: u32) -> Result<ApproxGraph> {
    if d < 2 || side < 1 {
        return Err(GeometryError::InvalidSpec(format!(
            "lattice_graph requires d >= 2 and side >= 1, got ({d}, {side})"
        )));
    }
    let spec = GasketSpec {
        family: Family::Sg,
        dimension: d,
        side,
        level: 1,
        vertex_guard: crate::DEFAULT_VERTEX_GUARD,
    };
    let point_count = crate::count_cells(d, side + 1)?; // C(d + side, d) lattice points
    if point_count > spec.vertex_guard {
        return Err(GeometryError::MemoryGuard {
            actual: point_count as u128,
            guard: spec.vertex_guard as u128,
        });
    }

    let points = crate::cells::compositions(side, d as usize + 1);
    let mut index = HashMap::new();
    let vertices: Vec<BaryVertex> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let coords: Vec<i64> = p.iter().map(|&x| x as i64).collect();
            index.insert(coords.clone(), i);
            BaryVertex::new(coords)
        })
        .collect();

    let dp1 = d as usize + 1;
    let mut edges = Vec::new();
    for (u, v) in vertices.iter().enumerate() {
        for i in 0..dp1 {
            for j in 0..dp1 {
                if i == j || v.coords[j] == 0 {
                    continue;
                }
                let mut w = v.coords.clone();
                w[i] += 1;
                w[j] -= 1;
                if let Some(&t) = index.get(&w) {
                    if u < t {
                        edges.push(Edge {
                            u,
                            v: t,
                            conductance: 1.0,
                        });
                    }
                }
            }
        }
    }
    edges.sort_by_key(|e| (e.u, e.v));

    // upward cells incident to each vertex: v - e_j for every positive coordinate j
    let letters = single_letters(&spec);
    let mut letter_index: HashMap<Vec<u32>, usize> = HashMap::new();
    for (i, a) in letters.iter().enumerate() {
        letter_index.insert(a.clone(), i);
    }
    let cells: Vec<CellWord> = letters
        .iter()
        .map(|a| CellWord {
            letters: vec![a.clone()],
        })
        .collect();
    let mut cell_membership = vec![Vec::new(); vertices.len()];
    for (u, v) in vertices.iter().enumerate() {
        for j in 0..dp1 {
            if v.coords[j] == 0 {
                continue;
            }
            let a: Vec<u32> = v
                .coords
                .iter()
                .enumerate()
                .map(|(k, &c)| if k == j { (c - 1) as u32 } else { c as u32 })
                .collect();
            let ci = letter_index[&a];
            cell_membership[u].push(ci);
        }
    }

    let boundary = (0..dp1)
        .map(|i| {
            let mut c = vec![0i64; dp1];
            c[i] = side as i64;
            index[&c]
        })
        .collect();

    let graph = ApproxGraph {
        spec,
        scheme: ConductanceScheme::SgUnit,
        vertices,
        edges,
        boundary,
        cells,
        cell_membership,
    };
    assert!(graph.is_connected(), "lattice graph is disconnected");
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sg_level_one_counts() {
        let g = build_graph(&GasketSpec::sg(2, 2, 1).unwrap(), ConductanceScheme::SgUnit).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 9);

        let g3 = build_graph(&GasketSpec::sg(3, 2, 1).unwrap(), ConductanceScheme::SgUnit).unwrap();
        assert_eq!(g3.vertex_count(), 10);
        assert_eq!(g3.edge_count(), 24);
    }

    #[test]
    fn sg_edge_count_formula() {
        // unit scheme: N^m * d(d+1)/2 edges, no cross-cell duplicates
        for (d, l, m) in [(2u32, 2u32, 2u32), (2, 3, 2), (3, 2, 2), (4, 2, 1)] {
            let spec = GasketSpec::sg(d, l, m).unwrap();
            let g = build_graph(&spec, ConductanceScheme::SgUnit).unwrap();
            let cells = spec.total_cells().unwrap();
            let expect = cells * (d as u128) * (d as u128 + 1) / 2;
            assert_eq!(g.edge_count() as u128, expect, "d={d} l={l} m={m}");
        }
    }

    #[test]
    fn vertex_recursion_matches_direct_count() {
        // V_{m+1} = union over letters of (l * V_m + l^m * a), deduplicated
        for (d, l) in [(2u32, 2u32), (2, 3), (3, 2)] {
            let spec1 = GasketSpec::sg(d, l, 1).unwrap();
            let letters = single_letters(&spec1);
            let mut level: Vec<Vec<i64>> = build_graph(&spec1, ConductanceScheme::SgUnit)
                .unwrap()
                .vertices
                .iter()
                .map(|v| v.coords.clone())
                .collect();
            for m in 2..=3u32 {
                let mut next: std::collections::HashSet<Vec<i64>> = Default::default();
                let weight = (l as i64).pow(m - 1);
                for a in &letters {
                    for v in &level {
                        let shifted: Vec<i64> = v
                            .iter()
                            .zip(a.iter())
                            .map(|(&c, &ai)| c + weight * ai as i64)
                            .collect();
                        next.insert(shifted);
                    }
                }
                let spec_m = GasketSpec::sg(d, l, m).unwrap();
                let direct = build_graph(&spec_m, ConductanceScheme::SgUnit).unwrap();
                assert_eq!(next.len(), direct.vertex_count(), "d={d} l={l} m={m}");
                level = next.into_iter().collect();
            }
        }
    }

    #[test]
    fn lattice_coincides_with_level_one_gasket() {
        for (d, l) in [(2u32, 2u32), (2, 5), (3, 3)] {
            let lat = lattice_graph(d, l).unwrap();
            let sg =
                build_graph(&GasketSpec::sg(d, l, 1).unwrap(), ConductanceScheme::SgUnit).unwrap();
            assert_eq!(lat.canonical_form(), sg.canonical_form(), "d={d} l={l}");
        }
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(lattice_graph(2, 64).unwrap().vertex_count(), 2145);
        assert_eq!(lattice_graph(3, 4).unwrap().vertex_count(), 35);
    }

    #[test]
    fn vicsek_corner_cells_touch_center() {
        let spec = GasketSpec::new(Family::Vs3d, 3, 3, 1).unwrap();
        let g = build_graph(
            &spec,
            ConductanceScheme::Vs3d {
                face: 1.0,
                long: 1.0,
            },
        )
        .unwrap();
        assert_eq!(g.cells.len(), 9);
        assert_eq!(g.vertex_count(), 64); // 9 * 8 - 8 shared corners
                                          // each corner cell shares exactly one vertex with the center cell
        let center_idx = g
            .cells
            .iter()
            .position(|w| w.letters[0] == vec![1, 1, 1])
            .unwrap();
        for (ci, w) in g.cells.iter().enumerate() {
            if ci == center_idx {
                continue;
            }
            let shared = g
                .cell_membership
                .iter()
                .filter(|cs| cs.contains(&ci) && cs.contains(&center_idx))
                .count();
            assert_eq!(shared, 1, "cell {:?}", w.letters);
        }
    }

    #[test]
    fn vicsek_graphs_are_connected_and_deduplicated() {
        for l in [3u32, 5, 7] {
            let spec = GasketSpec::new(Family::Vs2d, 2, l, 1).unwrap();
            let g = build_graph(&spec, ConductanceScheme::Vs2d { diagonal: 0.5 }).unwrap();
            assert!(g.is_connected());
            let mut coords: Vec<_> = g.vertices.iter().map(|v| v.coords.clone()).collect();
            coords.sort();
            coords.dedup();
            assert_eq!(coords.len(), g.vertex_count());
        }
    }

    #[test]
    fn nonpositive_conductance_rejected() {
        let spec = GasketSpec::new(Family::Vs2d, 2, 3, 1).unwrap();
        assert!(matches!(
            build_graph(&spec, ConductanceScheme::Vs2d { diagonal: 0.0 }),
            Err(GeometryError::NonPositiveConductance(_))
        ));
        assert!(build_graph(&spec, ConductanceScheme::SgUnit).is_err());
    }

    #[test]
    fn boundary_order_is_canonical() {
        let g = build_graph(&GasketSpec::sg(2, 3, 2).unwrap(), ConductanceScheme::SgUnit).unwrap();
        assert_eq!(g.boundary.len(), 3);
        assert_eq!(g.vertices[g.boundary[0]].coords, vec![9, 0, 0]);
        assert_eq!(g.vertices[g.boundary[1]].coords, vec![0, 9, 0]);
        assert_eq!(g.vertices[g.boundary[2]].coords, vec![0, 0, 9]);
    }

    #[test]
    fn memory_guard_fails_predictably() {
        let spec = GasketSpec::sg(2, 2, 3).unwrap().with_vertex_guard(10);
        assert!(matches!(
            build_graph(&spec, ConductanceScheme::SgUnit),
            Err(GeometryError::MemoryGuard { .. })
        ));
    }
}
