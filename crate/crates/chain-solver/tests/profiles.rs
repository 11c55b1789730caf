//! Exit-time and Poincare scaling profiles with their frozen first-run bands.

use std::sync::Arc;

use chain_solver::{
    crossing_time_stats, exit_time_profile, poincare_constant, ExitScaling, WalkModel,
};
use gasket_geometry::{build_graph, lattice_graph, ConductanceScheme, GasketSpec};
use network_resistance::{rho, ScaleFunction};

fn barycenter(model: &WalkModel) -> Vec<f64> {
    let positions = model.graph.euclidean_positions();
    let d = positions[0].len();
    (0..d)
        .map(|k| positions.iter().map(|p| p[k]).sum::<f64>() / positions.len() as f64)
        .collect()
}

#[test]
fn lattice_exit_steps_scale_quadratically() {
    let model = WalkModel::simple(Arc::new(lattice_graph(2, 32).unwrap())).unwrap();
    let center = barycenter(&model);
    let r = 8.0 / 32.0;
    let rows = exit_time_profile(&model, &center, &[r], None).unwrap();
    let normalized = rows[0].max_expected_steps / (r * 32.0).powi(2);
    assert!(
        (0.1..=10.0).contains(&normalized),
        "E_steps/(rL)^2 = {normalized} outside the order-of-magnitude band"
    );
}

#[test]
fn gasket_exit_times_track_the_scale_function() {
    let d = 2u32;
    let l = 4u32;
    let m = 2u32;
    let spec = GasketSpec::sg(d, l, m).unwrap();
    let graph = Arc::new(build_graph(&spec, ConductanceScheme::SgUnit).unwrap());
    let model = WalkModel::simple(graph.clone()).unwrap();
    let rho = rho(d, l).unwrap();
    let n_cells = spec.cells_per_level().unwrap() as f64;
    let d_w = (rho * n_cells).ln() / (l as f64).ln();
    let stats = crossing_time_stats(d, l, m).unwrap();
    let scaling = ExitScaling {
        time_per_step: stats.time_per_step,
        scale: ScaleFunction::new(l, d_w),
    };
    let center = model.graph.euclidean_positions()[graph.boundary[0]].clone();
    let rows = exit_time_profile(
        &model,
        &center,
        &[1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0],
        Some(&scaling),
    )
    .unwrap();
    let ratios: Vec<f64> = rows.iter().map(|r| r.psi_ratio.unwrap()).collect();
    // frozen band: first run gave [0.38, 0.88]
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    assert!(
        hi / lo <= 10.0,
        "psi ratios span more than a decade: {ratios:?}"
    );
    assert!(
        ratios.iter().all(|v| (0.05..=10.0).contains(v)),
        "psi ratios escaped the frozen band: {ratios:?}"
    );
    // profile is monotone in the radius
    assert!(rows[0].max_expected_steps <= rows[1].max_expected_steps);
    assert!(rows[1].max_expected_steps <= rows[2].max_expected_steps);
}

#[test]
fn cell_refinement_poincare_constant_tracks_psi_rho() {
    // one level-1 cell of the side-4 gasket, refined to level 2
    let d = 2u32;
    let l = 4u32;
    let spec = GasketSpec::sg(d, l, 2).unwrap();
    let graph = build_graph(&spec, ConductanceScheme::SgUnit).unwrap();
    let first_letter = graph.cells[0].letters[0].clone();
    let mut region = Vec::new();
    for (v, cells) in graph.cell_membership.iter().enumerate() {
        if cells
            .iter()
            .any(|&c| graph.cells[c].letters[0] == first_letter)
        {
            region.push(v);
        }
    }
    let lambda = poincare_constant(&graph, &region).unwrap();
    let rho = rho(d, l).unwrap();
    let n_cells = spec.cells_per_level().unwrap() as f64;
    let d_w = (rho * n_cells).ln() / (l as f64).ln();
    let psi = ScaleFunction::new(l, d_w);
    let stats = crossing_time_stats(d, l, 2).unwrap();
    let ratio = lambda * stats.time_per_step / (psi.value(1.0 / l as f64).unwrap() * rho);
    // frozen band: first run gave 0.0052
    assert!(
        (5e-4..=5e-2).contains(&ratio),
        "cell Poincare ratio {ratio} escaped the frozen band"
    );
}
