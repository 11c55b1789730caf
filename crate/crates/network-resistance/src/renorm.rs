//! Resistance renormalization of the gasket families.
//!
//! The level-1 graph with unit conductances determines the renormalization
//! factor: the corner-to-corner resistance equals `2 rho / (d + 1)`, so
//! `rho = (d + 1) / 2 * R`. A second, independent route traces the
//! unit-pair-resistance form onto the boundary and reads `rho` off the traced
//! conductance; the two routes agreeing is a standing invariant.

use gasket_geometry::{build_graph, ConductanceScheme, GasketSpec};
use num_rational::BigRational;
use serde::Serialize;

use crate::exact::{effective_resistance_exact, ratio, unit_edges, EXACT_NODE_LIMIT};
use crate::resistance::{all_pairs_resistance, effective_resistance, schur_trace};
use crate::solve::DENSE_LIMIT;
use crate::{NetError, ResistorNetwork, Result};

fn level_graph(d: u32, l: u32, m: u32, scheme: ConductanceScheme) -> Result<ResistorNetwork> {
    let spec = GasketSpec::sg(d, l, m)?;
    let graph = build_graph(&spec, scheme)?;
    Ok(ResistorNetwork::from_graph(&graph))
}

/// Corner-to-corner effective resistance of the level-m gasket graph with unit
/// conductances.
pub fn corner_resistance(d: u32, l: u32, m: u32) -> Result<f64> {
    let net = level_graph(d, l, m, ConductanceScheme::SgUnit)?;
    let boundary = net
        .boundary
        .clone()
        .expect("gasket graphs carry a boundary");
    effective_resistance(&net, boundary[0], boundary[1])
}

/// Renormalization factor via the unit-conductance level-1 corner resistance.
pub fn rho(d: u32, l: u32) -> Result<f64> {
    if d < 2 || l < 2 {
        return Err(NetError::InvalidInput(format!(
            "rho requires d >= 2 and l >= 2, got ({d}, {l})"
        )));
    }
    let r = corner_resistance(d, l, 1)?;
    let rho = (d as f64 + 1.0) / 2.0 * r;
    if rho <= 1.0 {
        return Err(NetError::NumericalFailure(format!(
            "computed rho({d}, {l}) = {rho} <= 1"
        )));
    }
    Ok(rho)
}

/// Exact rational renormalization factor, for small level-1 graphs.
pub fn rho_exact(d: u32, l: u32) -> Result<BigRational> {
    let spec = GasketSpec::sg(d, l, 1)?;
    let graph = build_graph(&spec, ConductanceScheme::SgUnit)?;
    if graph.vertex_count() > EXACT_NODE_LIMIT {
        return Err(NetError::Guard(format!(
            "exact rho limited to {EXACT_NODE_LIMIT} nodes, got {}",
            graph.vertex_count()
        )));
    }
    let edges: Vec<(usize, usize)> = graph.edges.iter().map(|e| (e.u, e.v)).collect();
    let r = effective_resistance_exact(
        graph.vertex_count(),
        &unit_edges(&edges),
        graph.boundary[0],
        graph.boundary[1],
    )?;
    Ok(r * ratio(d as i64 + 1, 2))
}

/// Second route: trace the level-1 network with pair conductance 2/(d+1) onto
/// the boundary; the traced pair conductance c satisfies rho = (2/(d+1)) / c.
pub fn rho_via_trace(d: u32, l: u32) -> Result<f64> {
    let net = level_graph(d, l, 1, ConductanceScheme::SgForm)?;
    let boundary = net.boundary.clone().expect("boundary");
    let traced = schur_trace(&net, &boundary)?;
    let nb = boundary.len();
    let mut pair = vec![vec![0.0f64; nb]; nb];
    for &(u, v, c) in &traced.edges {
        pair[u][v] = c;
        pair[v][u] = c;
    }
    let mut sum = 0.0;
    let mut count = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for u in 0..nb {
        for v in (u + 1)..nb {
            sum += pair[u][v];
            count += 1.0;
            min = min.min(pair[u][v]);
            max = max.max(pair[u][v]);
        }
    }
    let mean = sum / count;
    if (max - min).abs() > 1e-9 * mean.max(1.0) {
        return Err(NetError::OrbitAsymmetry { spread: max - min });
    }
    Ok((2.0 / (d as f64 + 1.0)) / mean)
}

/// Shorting lower bound for rho and, for d >= 3, its large-l limit
/// `(d+1)(d-1) / (d(d-2))`.
#[derive(Debug, Clone, Serialize)]
pub struct RhoLowerBound {
    /// (d+1) * sum_{i<=floor(l/2)} 1 / (d * N_{d-1,i})
    pub finite_sum: f64,
    /// Limit of the series bound; diverges (None) when d = 2.
    pub limit: Option<f64>,
}

pub fn rho_lower_bound(d: u32, l: u32) -> Result<RhoLowerBound> {
    if d < 2 {
        return Err(NetError::InvalidInput(format!(
            "rho_lower_bound requires d >= 2, got {d}"
        )));
    }
    let half = l / 2;
    let mut sum = 0.0;
    for i in 1..=half {
        let ring = gasket_geometry::count_cells(d - 1, i)? as f64;
        sum += 1.0 / (d as f64 * ring);
    }
    let finite_sum = (d as f64 + 1.0) * sum;
    let limit = if d >= 3 {
        let df = d as f64;
        Some((df + 1.0) * (df - 1.0) / (df * (df - 2.0)))
    } else {
        None
    };
    Ok(RhoLowerBound { finite_sum, limit })
}

/// Ratio of the level-m corner resistance to the level-1 value, to compare
/// against `rho^(m-1)`.
#[derive(Debug, Clone, Serialize)]
pub struct DecimationCheck {
    pub level_value: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

pub fn decimation_check(d: u32, l: u32, m: u32) -> Result<DecimationCheck> {
    let r1 = corner_resistance(d, l, 1)?;
    let rm = corner_resistance(d, l, m)?;
    let rho = (d as f64 + 1.0) / 2.0 * r1;
    let predicted = r1 * rho.powi(m as i32 - 1);
    Ok(DecimationCheck {
        level_value: rm,
        predicted,
        relative_error: (rm - predicted).abs() / predicted,
    })
}

/// Resistance diameter of a level-m gasket in the renormalized metric, and the
/// geometric-series upper bound `1 + 2 (1 - 1/rho)^{-1} sup_{V_1} R`.
#[derive(Debug, Clone, Serialize)]
pub struct DiameterReport {
    pub exact_at_level: f64,
    pub upper_bound: f64,
    pub rho: f64,
}

pub fn resistance_diameter(spec: &GasketSpec) -> Result<DiameterReport> {
    if spec.family != gasket_geometry::Family::Sg {
        return Err(NetError::InvalidInput(
            "resistance diameter is defined for the gasket family".into(),
        ));
    }
    let d = spec.dimension;
    let l = spec.side;
    let graph = build_graph(spec, ConductanceScheme::SgUnit)?;
    if graph.vertex_count() > DENSE_LIMIT {
        return Err(NetError::Guard(format!(
            "all-pairs diameter limited to {DENSE_LIMIT} nodes, got {}",
            graph.vertex_count()
        )));
    }
    let rho = rho(d, l)?;
    let net = ResistorNetwork::from_graph(&graph);
    let pairs = all_pairs_resistance(&net)?;
    let max_unit = pairs
        .iter()
        .flat_map(|row| row.iter().copied())
        .fold(0.0f64, f64::max);
    // metric scale at level m: (d+1)/2 * rho^{-m} times the unit-graph values
    let scale = (d as f64 + 1.0) / 2.0 * rho.powi(-(spec.level as i32));
    let exact_at_level = max_unit * scale;

    // the bound needs the level-1 supremum in the same metric
    let level1 = build_graph(&GasketSpec::sg(d, l, 1)?, ConductanceScheme::SgUnit)?;
    let net1 = ResistorNetwork::from_graph(&level1);
    let pairs1 = all_pairs_resistance(&net1)?;
    let max1_unit = pairs1
        .iter()
        .flat_map(|row| row.iter().copied())
        .fold(0.0f64, f64::max);
    let sup_v1 = (d as f64 + 1.0) / (2.0 * rho) * max1_unit;
    let upper_bound = 1.0 + 2.0 / (1.0 - 1.0 / rho) * sup_v1;
    Ok(DiameterReport {
        exact_at_level,
        upper_bound,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn rho_goldens_are_exact() {
        assert_eq!(rho_exact(2, 2).unwrap(), ratio(5, 3));
        assert_eq!(rho_exact(3, 2).unwrap(), ratio(3, 2));
        // corner resistance golden behind them
        let r = corner_resistance(2, 2, 1).unwrap();
        assert!((r - 10.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn rho_routes_agree() {
        for (d, l) in [(2u32, 2u32), (2, 5), (3, 2), (3, 3)] {
            let a = rho(d, l).unwrap();
            let b = rho_via_trace(d, l).unwrap();
            assert!((a - b).abs() <= 1e-10 * a, "d={d} l={l}: {a} vs {b}");
            let exactable = gasket_geometry::count_cells(d, l).unwrap() < 40;
            if exactable {
                let e = rho_exact(d, l).unwrap().to_f64().unwrap();
                assert!((a - e).abs() <= 1e-12 * e, "d={d} l={l}");
            }
        }
    }

    #[test]
    fn lower_bound_values() {
        let b = rho_lower_bound(3, 4).unwrap();
        assert!((b.finite_sum - 16.0 / 9.0).abs() < 1e-14);
        assert!((b.limit.unwrap() - 8.0 / 3.0).abs() < 1e-14);
        let b5 = rho_lower_bound(5, 2).unwrap();
        assert!((b5.limit.unwrap() - 8.0 / 5.0).abs() < 1e-14);
        assert!(rho_lower_bound(2, 8).unwrap().limit.is_none());
        assert!(rho_lower_bound(1, 2).is_err());
    }

    #[test]
    fn decimation_consistency_small() {
        for l in [2u32, 3] {
            let check = decimation_check(2, l, 2).unwrap();
            assert!(check.relative_error < 1e-8, "l={l}: {:?}", check);
        }
    }

    #[test]
    fn diameter_level_zero_is_one() {
        let report = resistance_diameter(&GasketSpec::sg(2, 2, 0).unwrap()).unwrap();
        assert!((report.exact_at_level - 1.0).abs() < 1e-12);
        assert!(report.exact_at_level <= report.upper_bound);
    }

    #[test]
    fn diameter_bound_holds_at_level_one() {
        for l in [2u32, 4, 8] {
            let report = resistance_diameter(&GasketSpec::sg(2, l, 1).unwrap()).unwrap();
            assert!(
                report.exact_at_level <= report.upper_bound,
                "l={l}: {:?}",
                report
            );
        }
    }
}
