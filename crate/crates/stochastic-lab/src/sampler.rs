use chain_solver::WalkModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{LabError, Result};

/// Samples per batch; batches are the unit of parallelism and seeding.
pub const BATCH_SIZE: u64 = 4096;

/// Reproducible simulation budget. Batch `w` uses seed `seed + w`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimConfig {
    pub seed: u64,
    pub samples: u64,
}

impl SimConfig {
    pub fn new(seed: u64, samples: u64) -> Result<Self> {
        if samples == 0 {
            return Err(LabError::InvalidInput("samples must be at least 1".into()));
        }
        Ok(SimConfig { seed, samples })
    }

    pub(crate) fn batches(&self) -> Vec<(u64, u64)> {
        // (batch index, batch sample count)
        let full = self.samples / BATCH_SIZE;
        let rem = self.samples % BATCH_SIZE;
        let mut out: Vec<(u64, u64)> = (0..full).map(|b| (b, BATCH_SIZE)).collect();
        if rem > 0 {
            out.push((full, rem));
        }
        out
    }

    pub(crate) fn rng_for_batch(&self, batch: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(batch))
    }
}

#[inline]
pub(crate) fn step(model: &WalkModel, v: usize, rng: &mut ChaCha8Rng) -> usize {
    let alpha = model.kind.hold_probability();
    if alpha > 0.0 && rng.random::<f64>() < alpha {
        return v;
    }
    let nbrs = &model.neighbors[v];
    let target = rng.random::<f64>() * model.degree[v];
    let mut acc = 0.0;
    for &(w, c) in nbrs {
        acc += c;
        if target < acc {
            return w;
        }
    }
    nbrs[nbrs.len() - 1].0
}

/// Endpoint distribution of the walk after a fixed number of steps.
#[derive(Debug, Clone, Serialize)]
pub struct EndpointReport {
    pub samples: u64,
    pub steps: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
}

pub fn endpoint_distribution(
    model: &WalkModel,
    config: &SimConfig,
    start: usize,
    steps: u64,
) -> Result<EndpointReport> {
    let stats = sample_paths(model, config, start, steps, None)?;
    let frequencies = stats
        .endpoint_counts
        .iter()
        .map(|&c| c as f64 / config.samples as f64)
        .collect();
    Ok(EndpointReport {
        samples: config.samples,
        steps,
        counts: stats.endpoint_counts,
        frequencies,
    })
}

/// Aggregated trajectory statistics: endpoint counts at the final step, the
/// mean running maximum of Euclidean displacement, and (when a target set is
/// given) first-hitting step counts and hit locations.
#[derive(Debug, Clone, Serialize)]
pub struct PathStatistics {
    pub samples: u64,
    pub steps: u64,
    pub endpoint_counts: Vec<u64>,
    pub mean_max_displacement: f64,
    pub hitting: Option<HittingStatistics>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HittingStatistics {
    pub hits: u64,
    pub mean_steps: f64,
    pub std_error: f64,
    /// count of first hits per target, aligned with the target slice
    pub target_counts: Vec<u64>,
}

struct Partial {
    endpoint_counts: Vec<u64>,
    sum_max_disp: f64,
    hits: u64,
    hit_sum: f64,
    hit_sum_sq: f64,
    target_counts: Vec<u64>,
}

pub fn sample_paths(
    model: &WalkModel,
    config: &SimConfig,
    start: usize,
    steps: u64,
    targets: Option<&[usize]>,
) -> Result<PathStatistics> {
    let n = model.vertex_count();
    if start >= n {
        return Err(LabError::InvalidInput(format!(
            "start {start} out of range"
        )));
    }
    let positions = model.graph.euclidean_positions();
    let target_index: Option<Vec<usize>> = targets.map(|ts| {
        let mut idx = vec![usize::MAX; n];
        for (i, &t) in ts.iter().enumerate() {
            idx[t] = i;
        }
        idx
    });
    let n_targets = targets.map_or(0, |t| t.len());

    let partials: Vec<Partial> = config
        .batches()
        .into_par_iter()
        .map(|(batch, count)| {
            let mut rng = config.rng_for_batch(batch);
            let mut p = Partial {
                endpoint_counts: vec![0u64; n],
                sum_max_disp: 0.0,
                hits: 0,
                hit_sum: 0.0,
                hit_sum_sq: 0.0,
                target_counts: vec![0u64; n_targets],
            };
            let p0 = &positions[start];
            for _ in 0..count {
                let mut v = start;
                let mut max_disp = 0.0f64;
                let mut hit_step: Option<u64> = None;
                for s in 1..=steps {
                    v = step(model, v, &mut rng);
                    let disp: f64 = positions[v]
                        .iter()
                        .zip(p0.iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    max_disp = max_disp.max(disp);
                    if hit_step.is_none() {
                        if let Some(idx) = &target_index {
                            if idx[v] != usize::MAX {
                                hit_step = Some(s);
                                p.target_counts[idx[v]] += 1;
                            }
                        }
                    }
                }
                p.endpoint_counts[v] += 1;
                p.sum_max_disp += max_disp;
                if let Some(s) = hit_step {
                    p.hits += 1;
                    p.hit_sum += s as f64;
                    p.hit_sum_sq += (s as f64) * (s as f64);
                }
            }
            p
        })
        .collect();

    // merge in batch order
    let mut endpoint_counts = vec![0u64; n];
    let mut sum_max = 0.0;
    let mut hits = 0u64;
    let mut hit_sum = 0.0;
    let mut hit_sum_sq = 0.0;
    let mut target_counts = vec![0u64; n_targets];
    for p in partials {
        for (a, b) in endpoint_counts.iter_mut().zip(p.endpoint_counts) {
            *a += b;
        }
        sum_max += p.sum_max_disp;
        hits += p.hits;
        hit_sum += p.hit_sum;
        hit_sum_sq += p.hit_sum_sq;
        for (a, b) in target_counts.iter_mut().zip(p.target_counts) {
            *a += b;
        }
    }

    let hitting = targets.map(|_| {
        let mean = if hits > 0 {
            hit_sum / hits as f64
        } else {
            f64::NAN
        };
        let var = if hits > 1 {
            (hit_sum_sq - hit_sum * hit_sum / hits as f64) / (hits as f64 - 1.0)
        } else {
            f64::NAN
        };
        HittingStatistics {
            hits,
            mean_steps: mean,
            std_error: (var / hits as f64).sqrt(),
            target_counts,
        }
    });

    Ok(PathStatistics {
        samples: config.samples,
        steps,
        endpoint_counts,
        mean_max_displacement: sum_max / config.samples as f64,
        hitting,
    })
}
