//! Bagged ensembles and design-uncertainty statistics.
//!
//! Each replicate refits the model on a random column subset of the global
//! regression pair, the same indices applied to both sides so pairs stay
//! aligned. Per-run seeds are derived from the base seed with a splitmix
//! mixer, which makes replicates independent of execution order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{assemble_regression, fit_from_regression, FitConfig, IdDmdModel};
use crate::observables::{polynomial_delay_lift, ObservableConfig};
use crate::snapshots::{assemble_shifted_pairs, ScalingFactors, SnapshotSet};

/// Bagging protocol parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BagConfig {
    /// Number of replicates.
    pub n_runs: usize,
    /// Fraction of regression columns kept per replicate, in `(0, 1]`.
    pub column_fraction: f64,
    /// Base seed; replicate `i` uses `splitmix64(seed + i)`.
    pub seed: u64,
}

impl Default for BagConfig {
    fn default() -> Self {
        BagConfig { n_runs: 30, column_fraction: 0.5, seed: 0 }
    }
}

/// Standard 64-bit mixer used to derive independent per-run seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sorted sample of `k` distinct column indices out of `n`.
fn sample_columns(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// Fits `n_runs` replicate models on random column subsets.
pub fn bagged_ensemble(
    set: &SnapshotSet,
    fit_cfg: &FitConfig,
    bag: &BagConfig,
) -> Result<Vec<IdDmdModel>> {
    if bag.n_runs == 0 {
        return Err(Error::InvalidArgument("n_runs must be positive".into()));
    }
    if !(bag.column_fraction > 0.0 && bag.column_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "column_fraction must lie in (0, 1], got {}",
            bag.column_fraction
        )));
    }
    set.validate()?;
    let observables = fit_cfg
        .observables
        .clone()
        .unwrap_or_else(|| ObservableConfig::identity(set.state_dim()));
    let lifted = polynomial_delay_lift(set, &observables)?;
    let alpha = match &fit_cfg.alpha {
        Some(a) => ScalingFactors::new(a.clone())?,
        None => ScalingFactors::from_training(set),
    };
    let pairs = assemble_shifted_pairs(&lifted.set, &alpha)?;
    let reg = assemble_regression(&pairs)?;
    let n = reg.pair_count();
    let keep = ((bag.column_fraction * n as f64).floor() as usize).max(1);
    if let Some(r_xi) = fit_cfg.rank_xi {
        if keep < r_xi {
            return Err(Error::InvalidArgument(format!(
                "subsampling keeps {keep} columns, fewer than rank {r_xi}"
            )));
        }
    }
    (0..bag.n_runs)
        .into_par_iter()
        .map(|run| {
            let sub = if keep == n {
                reg.clone()
            } else {
                let idx = sample_columns(n, keep, splitmix64(bag.seed.wrapping_add(run as u64)));
                reg.select_columns(&idx)
            };
            fit_from_regression(
                &sub,
                alpha.clone(),
                set.dt,
                set.param_names.clone(),
                observables.clone(),
                fit_cfg.rank_z,
                fit_cfg.rank_xi,
            )
        })
        .collect()
}

/// Summary statistics of a scalar query over an ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    /// Replicate values, in run order, failures omitted.
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n-1 divisor); zero for one value.
    pub std: f64,
    /// 5th percentile (linear interpolation).
    pub p5: f64,
    /// 95th percentile (linear interpolation).
    pub p95: f64,
    /// Replicates that evaluated successfully.
    pub n: usize,
    /// Per-replicate failures as (run index, message).
    pub failures: Vec<(usize, String)>,
}

/// Linearly interpolated percentile of sorted data, `q` in `[0, 100]`.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q / 100.0 * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Evaluates a scalar query on every replicate and summarizes the results.
/// Failing replicates are reported individually; the summary covers the
/// survivors.
pub fn ensemble_statistics<F>(ensemble: &[IdDmdModel], query: F) -> Result<EnsembleSummary>
where
    F: Fn(&IdDmdModel) -> Result<f64>,
{
    if ensemble.is_empty() {
        return Err(Error::InvalidArgument("empty ensemble".into()));
    }
    let mut values = Vec::with_capacity(ensemble.len());
    let mut failures = Vec::new();
    for (i, model) in ensemble.iter().enumerate() {
        match query(model) {
            Ok(v) => values.push(v),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    if values.is_empty() {
        return Err(Error::Numeric("query failed on every replicate".into()));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p5 = percentile(&sorted, 5.0);
    let p95 = percentile(&sorted, 95.0);
    Ok(EnsembleSummary { values, mean, std, p5, p95, n, failures })
}
