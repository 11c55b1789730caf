use std::sync::Arc;

use chain_solver::{crossing_time_stats, hitting_moments, WalkModel};
use gasket_geometry::{build_graph, ConductanceScheme, GasketSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::sampler::step;
use crate::{LabError, Result, SimConfig};

/// Distribution of the normalized worst-case drift of crossing times from
/// their linear growth, over simulated trajectories.
#[derive(Debug, Clone, Serialize)]
pub struct T1ConcentrationReport {
    pub d: u32,
    pub l: u32,
    pub m: u32,
    pub horizon: f64,
    pub crossings_per_sample: u64,
    pub samples: u64,
    pub seed: u64,
    pub tau: f64,
    pub time_per_step: f64,
    /// exact expected steps of the first crossing, from the solver
    pub exact_mean_t1_steps: f64,
    /// Monte Carlo mean and standard error of the first-crossing steps
    pub empirical_mean_t1_steps: f64,
    pub empirical_t1_std_error: f64,
    /// quantiles of sup_n |T_n - n E T_1| / tau over samples
    pub sup_quantiles: SupQuantiles,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupQuantiles {
    pub q10: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q90: f64,
    pub max: f64,
}

/// Simulates the level-1 crossing times of the level-m walk: cumulative step
/// counts at successive hits of the level-1 vertex set away from the current
/// anchor. Requires m >= 2 so crossings are nontrivial step sums.
pub fn t1_concentration(
    d: u32,
    l: u32,
    m: u32,
    rho: f64,
    horizon: f64,
    config: &SimConfig,
) -> Result<T1ConcentrationReport> {
    if m < 2 {
        return Err(LabError::InvalidInput(
            "concentration experiment needs level m >= 2".into(),
        ));
    }
    if !(horizon > 0.0) {
        return Err(LabError::InvalidInput("horizon must be positive".into()));
    }
    let spec = GasketSpec::sg(d, l, m)?;
    let graph = Arc::new(build_graph(&spec, ConductanceScheme::SgUnit)?);
    let model = WalkModel::simple(graph.clone())?;

    // level-1 vertices inside the level-m graph: coordinates divisible by l^(m-1)
    let coarse = (l as i64).pow(m - 1);
    let v1: Vec<bool> = graph
        .vertices
        .iter()
        .map(|v| v.coords.iter().all(|&c| c % coarse == 0))
        .collect();
    let start = graph.boundary[0];

    let targets: Vec<usize> = (0..graph.vertex_count())
        .filter(|&v| v1[v] && v != start)
        .collect();
    let exact_mean_t1 = hitting_moments(&model, start, &targets)?.expected_steps;

    let stats = crossing_time_stats(d, l, m)?;
    let tps = stats.time_per_step;
    let n_cells = spec.cells_per_level()? as f64;
    let tau = (l as f64).powi(2) / (2.0 * rho * n_cells);
    let crossings = ((l as f64) * (l as f64) * horizon).floor() as u64;
    if crossings == 0 {
        return Err(LabError::InvalidInput(format!(
            "horizon {horizon} gives zero crossings at side {l}"
        )));
    }

    struct Partial {
        sups: Vec<f64>,
        t1_sum: f64,
        t1_sum_sq: f64,
    }

    let et1_time = exact_mean_t1 * tps;
    let partials: Vec<Partial> = config
        .batches()
        .into_par_iter()
        .map(|(batch, count)| {
            let mut rng = config.rng_for_batch(batch);
            let mut p = Partial {
                sups: Vec::with_capacity(count as usize),
                t1_sum: 0.0,
                t1_sum_sq: 0.0,
            };
            for _ in 0..count {
                let mut v = start;
                let mut anchor = start;
                let mut steps: u64 = 0;
                let mut sup = 0.0f64;
                let mut first: Option<u64> = None;
                for k in 1..=crossings {
                    loop {
                        v = step(&model, v, &mut rng);
                        steps += 1;
                        if v1[v] && v != anchor {
                            break;
                        }
                    }
                    anchor = v;
                    if k == 1 {
                        first = Some(steps);
                    }
                    let drift = (steps as f64 * tps - k as f64 * et1_time).abs() / tau;
                    sup = sup.max(drift);
                }
                p.sups.push(sup);
                let f = first.expect("at least one crossing") as f64;
                p.t1_sum += f;
                p.t1_sum_sq += f * f;
            }
            p
        })
        .collect();

    let mut sups = Vec::with_capacity(config.samples as usize);
    let mut t1_sum = 0.0;
    let mut t1_sum_sq = 0.0;
    for p in partials {
        sups.extend(p.sups);
        t1_sum += p.t1_sum;
        t1_sum_sq += p.t1_sum_sq;
    }
    sups.sort_by(|a, b| a.partial_cmp(b).expect("finite sup statistics"));
    let n = config.samples as f64;
    let mean_t1 = t1_sum / n;
    let var_t1 = if config.samples > 1 {
        (t1_sum_sq - t1_sum * t1_sum / n) / (n - 1.0)
    } else {
        f64::NAN
    };

    let q = |frac: f64| -> f64 {
        let idx = ((frac * sups.len() as f64).ceil() as usize).clamp(1, sups.len()) - 1;
        sups[idx]
    };
    Ok(T1ConcentrationReport {
        d,
        l,
        m,
        horizon,
        crossings_per_sample: crossings,
        samples: config.samples,
        seed: config.seed,
        tau,
        time_per_step: tps,
        exact_mean_t1_steps: exact_mean_t1,
        empirical_mean_t1_steps: mean_t1,
        empirical_t1_std_error: (var_t1 / n).sqrt(),
        sup_quantiles: SupQuantiles {
            q10: q(0.10),
            q25: q(0.25),
            median: q(0.50),
            q75: q(0.75),
            q90: q(0.90),
            max: *sups.last().expect("nonempty samples"),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_seeded_trajectory_is_reproducible() {
        let config = SimConfig::new(5, 1).unwrap();
        let a = t1_concentration(2, 2, 2, 5.0 / 3.0, 1.0, &config).unwrap();
        let b = t1_concentration(2, 2, 2, 5.0 / 3.0, 1.0, &config).unwrap();
        assert_eq!(a.sup_quantiles.max.to_bits(), b.sup_quantiles.max.to_bits());
        assert_eq!(a.empirical_mean_t1_steps, b.empirical_mean_t1_steps);
    }

    #[test]
    fn first_crossing_matches_exact_mean() {
        let config = SimConfig::new(77, 20_000).unwrap();
        let r = t1_concentration(2, 2, 2, 5.0 / 3.0, 1.0, &config).unwrap();
        // exact mean of the first crossing from a corner is (rho N)^(m-1) = 5
        assert!((r.exact_mean_t1_steps - 5.0).abs() < 1e-9);
        let dev = (r.empirical_mean_t1_steps - r.exact_mean_t1_steps).abs();
        assert!(
            dev <= 4.0 * r.empirical_t1_std_error,
            "empirical {} vs exact {} (4 se = {})",
            r.empirical_mean_t1_steps,
            r.exact_mean_t1_steps,
            4.0 * r.empirical_t1_std_error
        );
    }

    #[test]
    fn level_one_is_rejected() {
        let config = SimConfig::new(1, 10).unwrap();
        assert!(t1_concentration(2, 2, 1, 5.0 / 3.0, 1.0, &config).is_err());
    }
}
