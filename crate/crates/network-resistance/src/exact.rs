//! Exact big-rational network reduction for small graphs.
//!
//! Interior nodes are eliminated one at a time by the star-mesh transform:
//! removing node k adds conductance `c_ik * c_jk / c_k` between every pair of
//! its neighbours, where `c_k` is the total conductance at k. Eliminating all
//! nodes but two leaves the exact pair conductance. This path backs golden
//! values and oracles; it shares no code with the floating-point solvers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{NetError, Result};

/// Node-count cap for exact reduction; elimination is cubic with growing
/// rationals, so this stays deliberately small.
pub const EXACT_NODE_LIMIT: usize = 64;

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Dense conductance matrix from an edge list (parallel edges add).
fn conductance_matrix(
    node_count: usize,
    edges: &[(usize, usize, BigRational)],
) -> Result<Vec<Vec<BigRational>>> {
    if node_count > EXACT_NODE_LIMIT {
        return Err(NetError::Guard(format!(
            "exact reduction limited to {EXACT_NODE_LIMIT} nodes, got {node_count}"
        )));
    }
    let mut c = vec![vec![BigRational::zero(); node_count]; node_count];
    for (u, v, w) in edges {
        if u == v || *u >= node_count || *v >= node_count {
            return Err(NetError::InvalidInput(format!("bad edge ({u}, {v})")));
        }
        if w <= &BigRational::zero() {
            return Err(NetError::InvalidInput(
                "nonpositive exact conductance".into(),
            ));
        }
        c[*u][*v] += w;
        c[*v][*u] += w;
    }
    Ok(c)
}

/// Star-mesh elimination of every node not in `keep`. Returns the conductance
/// matrix among the kept nodes, indexed by their order in `keep`.
pub fn eliminate_to(
    node_count: usize,
    edges: &[(usize, usize, BigRational)],
    keep: &[usize],
) -> Result<Vec<Vec<BigRational>>> {
    let mut c = conductance_matrix(node_count, edges)?;
    let mut alive: Vec<bool> = vec![true; node_count];
    let keep_set: Vec<bool> = {
        let mut s = vec![false; node_count];
        for &k in keep {
            s[k] = true;
        }
        s
    };
    for k in 0..node_count {
        if keep_set[k] {
            continue;
        }
        let total: BigRational = (0..node_count)
            .filter(|&j| alive[j] && j != k)
            .map(|j| c[k][j].clone())
            .fold(BigRational::zero(), |a, b| a + b);
        if total.is_zero() {
            // isolated interior node: nothing to redistribute
            alive[k] = false;
            continue;
        }
        let nbrs: Vec<usize> = (0..node_count)
            .filter(|&j| alive[j] && j != k && !c[k][j].is_zero())
            .collect();
        for (a, &i) in nbrs.iter().enumerate() {
            for &j in nbrs.iter().skip(a + 1) {
                let add = &c[k][i] * &c[k][j] / &total;
                c[i][j] += &add;
                c[j][i] += add;
            }
        }
        for &i in &nbrs {
            c[k][i] = BigRational::zero();
            c[i][k] = BigRational::zero();
        }
        alive[k] = false;
    }
    Ok(keep
        .iter()
        .map(|&i| keep.iter().map(|&j| c[i][j].clone()).collect())
        .collect())
}

/// Exact effective resistance between two nodes of a connected network.
pub fn effective_resistance_exact(
    node_count: usize,
    edges: &[(usize, usize, BigRational)],
    a: usize,
    b: usize,
) -> Result<BigRational> {
    if a == b {
        return Ok(BigRational::zero());
    }
    let reduced = eliminate_to(node_count, edges, &[a, b])?;
    let c = &reduced[0][1];
    if c.is_zero() {
        return Err(NetError::DisconnectedPair(a, b));
    }
    Ok(BigRational::one() / c)
}

pub fn unit_edges(edges: &[(usize, usize)]) -> Vec<(usize, usize, BigRational)> {
    edges
        .iter()
        .map(|&(u, v)| (u, v, BigRational::one()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_parallel_laws() {
        // two unit resistors in series
        let r = effective_resistance_exact(3, &unit_edges(&[(0, 1), (1, 2)]), 0, 2).unwrap();
        assert_eq!(r, ratio(2, 1));
        // two unit resistors in parallel
        let r = effective_resistance_exact(
            2,
            &[(0, 1, BigRational::one()), (0, 1, BigRational::one())],
            0,
            1,
        )
        .unwrap();
        assert_eq!(r, ratio(1, 2));
    }

    #[test]
    fn complete_graph_pair_resistance() {
        // K_n with unit conductances: R = 2/n
        for n in 2..=6usize {
            let mut edges = vec![];
            for u in 0..n {
                for v in (u + 1)..n {
                    edges.push((u, v));
                }
            }
            let r = effective_resistance_exact(n, &unit_edges(&edges), 0, 1).unwrap();
            assert_eq!(r, ratio(2, n as i64));
        }
    }

    #[test]
    fn disconnected_pair_is_an_error() {
        let r = effective_resistance_exact(4, &unit_edges(&[(0, 1), (2, 3)]), 0, 3);
        assert!(matches!(r, Err(NetError::DisconnectedPair(0, 3))));
    }

    #[test]
    fn trace_of_path_is_series_law() {
        // a - x - b with unit conductances traced to {a, b}: conductance 1/2
        let traced = eliminate_to(3, &unit_edges(&[(0, 1), (1, 2)]), &[0, 2]).unwrap();
        assert_eq!(traced[0][1], ratio(1, 2));
    }
}
