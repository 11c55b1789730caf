//! Property: the floating-point resistance solver agrees with the exact
//! rational star-mesh reduction on arbitrary small integer-conductance
//! networks.

use network_resistance::exact::{effective_resistance_exact, ratio};
use network_resistance::{effective_resistance, ResistorNetwork};
use num_traits::ToPrimitive;
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct SmallNetwork {
    nodes: usize,
    /// (u, v, conductance numerator); denominators are fixed at 4
    edges: Vec<(usize, usize, u8)>,
}

fn small_network() -> impl Strategy<Value = SmallNetwork> {
    (4usize..10)
        .prop_flat_map(|nodes| {
            let tree = proptest::collection::vec(1u8..=40, nodes - 1);
            let extras = proptest::collection::vec(
                (0..nodes, 0..nodes, 1u8..=40),
                0..(2 * nodes),
            );
            (Just(nodes), tree, extras)
        })
        .prop_map(|(nodes, tree, extras)| {
            // a random tree keeps everything connected; extras add cycles
            let mut edges: Vec<(usize, usize, u8)> = tree
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    let v = i + 1;
                    (v / 2, v, c)
                })
                .collect();
            for (u, v, c) in extras {
                if u != v {
                    edges.push((u.min(v), u.max(v), c));
                }
            }
            SmallNetwork { nodes, edges }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_matches_exact_reduction(net in small_network(), a in 0usize..10, b in 0usize..10) {
        let a = a % net.nodes;
        let b = b % net.nodes;
        prop_assume!(a != b);
        let float_edges: Vec<(usize, usize, f64)> = net
            .edges
            .iter()
            .map(|&(u, v, c)| (u, v, c as f64 / 4.0))
            .collect();
        let exact_edges: Vec<_> = net
            .edges
            .iter()
            .map(|&(u, v, c)| (u, v, ratio(c as i64, 4)))
            .collect();
        let network = ResistorNetwork::new(net.nodes, float_edges).unwrap();
        let solved = effective_resistance(&network, a, b).unwrap();
        let exact = effective_resistance_exact(net.nodes, &exact_edges, a, b)
            .unwrap()
            .to_f64()
            .unwrap();
        prop_assert!(
            (solved - exact).abs() <= 1e-10 * exact.max(1.0),
            "R({a},{b}) solved {solved} vs exact {exact}"
        );
    }
}
