//! Renormalization fixed points for the Vicsek families, and the closed-form
//! corner-to-corner resistance of the weighted cube that controls the 3D
//! lower bound.

use gasket_geometry::{build_graph, ConductanceScheme, Family, GasketSpec};
use serde::Serialize;

use crate::resistance::{effective_resistance, schur_trace};
use crate::{NetError, ResistorNetwork, Result};

const DAMPING: f64 = 0.5;
const ORBIT_TOLERANCE: f64 = 1e-9;

/// A converged renormalization fixed point: the cell conductance parameters
/// reproduced by the boundary trace of the level-1 network, up to the uniform
/// factor 1/rho.
#[derive(Debug, Clone, Serialize)]
pub struct VicsekFixedPoint {
    pub family: Family,
    pub side: u32,
    /// `[w]` for the square family (diagonal conductance), `[c2, c3]` for the
    /// cube family (face and long diagonal conductances); edges are 1.
    pub params: Vec<f64>,
    pub rho: f64,
    pub residual: f64,
    pub iterations: u32,
}

fn scheme_for(family: Family, params: &[f64]) -> Result<ConductanceScheme> {
    match family {
        Family::Vs2d => Ok(ConductanceScheme::Vs2d {
            diagonal: params[0],
        }),
        Family::Vs3d => Ok(ConductanceScheme::Vs3d {
            face: params[0],
            long: params[1],
        }),
        Family::Sg => Err(NetError::InvalidInput(
            "fixed-point iteration applies to the Vicsek families".into(),
        )),
    }
}

/// One application of the renormalization map: build the level-1 network with
/// the given cell parameters, trace onto the 0-cell corners, average the
/// traced conductances over the symmetry orbits (corner pairs at equal Hamming
/// distance), and normalize the edge class to 1.
///
/// Returns the normalized parameters and the traced edge conductance before
/// normalization (whose reciprocal is rho at a fixed point).
fn trace_map(family: Family, side: u32, params: &[f64]) -> Result<(Vec<f64>, f64)> {
    let d = if family == Family::Vs2d { 2 } else { 3 };
    let spec = GasketSpec::new(family, d, side, 1)?;
    let scheme = scheme_for(family, params)?;
    let graph = build_graph(&spec, scheme)?;
    let net = ResistorNetwork::from_graph(&graph);
    let boundary = net
        .boundary
        .clone()
        .expect("vicsek graphs carry a boundary");
    let traced = schur_trace(&net, &boundary)?;

    let nb = boundary.len();
    let mut pair = vec![vec![0.0f64; nb]; nb];
    for &(u, v, c) in &traced.edges {
        pair[u][v] = c;
        pair[v][u] = c;
    }
    // boundary index b encodes the corner bit pattern; orbits are Hamming classes
    let mut class_sum = vec![0.0f64; d as usize + 1];
    let mut class_count = vec![0u32; d as usize + 1];
    let mut class_min = vec![f64::INFINITY; d as usize + 1];
    let mut class_max = vec![f64::NEG_INFINITY; d as usize + 1];
    for u in 0..nb {
        for v in (u + 1)..nb {
            let h = ((u ^ v) as u32).count_ones() as usize;
            class_sum[h] += pair[u][v];
            class_count[h] += 1;
            class_min[h] = class_min[h].min(pair[u][v]);
            class_max[h] = class_max[h].max(pair[u][v]);
        }
    }
    let mut means = Vec::new();
    for h in 1..=d as usize {
        let mean = class_sum[h] / class_count[h] as f64;
        let spread = class_max[h] - class_min[h];
        if spread > ORBIT_TOLERANCE * mean.abs().max(1.0) {
            return Err(NetError::OrbitAsymmetry { spread });
        }
        means.push(mean);
    }
    let edge = means[0];
    if !(edge > 0.0) {
        return Err(NetError::NumericalFailure(
            "traced edge conductance is not positive".into(),
        ));
    }
    let normalized: Vec<f64> = means[1..].iter().map(|&m| m / edge).collect();
    Ok((normalized, edge))
}

/// Damped Picard iteration of the renormalization map until the residual
/// `max |T(params) - params|` drops below `tolerance`.
pub fn vicsek_fixed_point(
    family: Family,
    side: u32,
    tolerance: f64,
    max_iter: u32,
) -> Result<VicsekFixedPoint> {
    let d = if family == Family::Vs2d { 2usize } else { 3 };
    let mut params = vec![1.0f64; d - 1];
    let mut last_residual = f64::INFINITY;
    for it in 1..=max_iter {
        let (mapped, edge) = trace_map(family, side, &params)?;
        let residual = mapped
            .iter()
            .zip(params.iter())
            .map(|(m, p)| (m - p).abs())
            .fold(0.0f64, f64::max);
        if residual < tolerance {
            return Ok(VicsekFixedPoint {
                family,
                side,
                params,
                rho: 1.0 / edge,
                residual,
                iterations: it,
            });
        }
        last_residual = residual;
        for (p, m) in params.iter_mut().zip(mapped.iter()) {
            *p = (1.0 - DAMPING) * *p + DAMPING * m;
        }
    }
    Err(NetError::NonConvergence {
        residual: last_residual,
        iterations: max_iter,
        last: params,
    })
}

/// Cross-check of a fixed point through the resistance route: the ratio of the
/// level-1 corner-to-corner resistance to the single-cell value, which equals
/// rho when the parameters are self-reproducing.
pub fn vicsek_rho_check(fp: &VicsekFixedPoint) -> Result<f64> {
    let d = if fp.family == Family::Vs2d { 2u32 } else { 3 };
    let spec = GasketSpec::new(fp.family, d, fp.side, 1)?;
    let scheme = scheme_for(fp.family, &fp.params)?;
    let graph = build_graph(&spec, scheme)?;
    let net = ResistorNetwork::from_graph(&graph);
    let boundary = net.boundary.clone().expect("boundary");
    let far = boundary.len() - 1; // opposite corner, all bits set
    let r_level1 = effective_resistance(&net, boundary[0], boundary[far])?;

    let cell = single_cell_network(fp.family, &fp.params)?;
    let r_cell = effective_resistance(&cell, 0, cell.node_count - 1)?;
    Ok(r_level1 / r_cell)
}

fn single_cell_network(family: Family, params: &[f64]) -> Result<ResistorNetwork> {
    let d = if family == Family::Vs2d { 2usize } else { 3 };
    let mut edges = Vec::new();
    for u in 0..1usize << d {
        for v in (u + 1)..1usize << d {
            let h = ((u ^ v) as u32).count_ones() as usize;
            let c = match h {
                1 => 1.0,
                2 => params[0],
                _ => params[1],
            };
            edges.push((u, v, c));
        }
    }
    ResistorNetwork::new(1 << d, edges)
}

/// Corner-to-opposite-corner resistance of the unit cube with edge resistance
/// 1, face-diagonal resistance `a` and long-diagonal resistance `b`:
/// `b (5ab + 2a + b) / (2 (a + 2b + ab)(3b + 1))`.
pub fn cube_corner_resistance(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(NetError::InvalidInput(format!(
            "cube resistances must be positive, got a={a}, b={b}"
        )));
    }
    Ok(0.5 * b * (5.0 * a * b + 2.0 * a + b) / ((a + 2.0 * b + a * b) * (3.0 * b + 1.0)))
}

/// The explicit weighted cube as a network: conductance 1 on edges, 1/a on
/// face diagonals, 1/b on long diagonals. Node index bits are coordinates;
/// the corner pair (0, 7) spans the long diagonal.
pub fn cube_network(a: f64, b: f64) -> Result<ResistorNetwork> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(NetError::InvalidInput(format!(
            "cube resistances must be positive, got a={a}, b={b}"
        )));
    }
    let mut edges = Vec::new();
    for u in 0..8usize {
        for v in (u + 1)..8 {
            let c = match ((u ^ v) as u32).count_ones() {
                1 => 1.0,
                2 => 1.0 / a,
                _ => 1.0 / b,
            };
            edges.push((u, v, c));
        }
    }
    ResistorNetwork::new(8, edges)
}

/// `eta(a, b) = 1 / (2 R(0, A3) (1 + 2/a + 1/b))`, the efficiency factor of
/// the 3D shorting bound; takes values in [1/2, 3/5] on a, b >= 1.
pub fn eta(a: f64, b: f64) -> Result<f64> {
    if !(a >= 1.0) || !(b >= 1.0) {
        return Err(NetError::InvalidInput(format!(
            "eta is defined for a, b >= 1, got ({a}, {b})"
        )));
    }
    let r = cube_corner_resistance(a, b)?;
    Ok(1.0 / (2.0 * r * (1.0 + 2.0 / a + 1.0 / b)))
}

/// `pi/sqrt(3) * tanh(pi / (2 sqrt(3)))`, the series constant of the 3D
/// shorting bound (about 1.305).
pub fn vs3d_liminf_constant() -> f64 {
    let s3 = 3.0f64.sqrt();
    std::f64::consts::PI / s3 * (std::f64::consts::PI / (2.0 * s3)).tanh()
}

/// Asymptotic lower bound for the 3D Vicsek rho at given diagonal resistances:
/// twice the series constant times eta.
pub fn vs3d_rho_liminf(a: f64, b: f64) -> Result<f64> {
    Ok(2.0 * vs3d_liminf_constant() * eta(a, b)?)
}
