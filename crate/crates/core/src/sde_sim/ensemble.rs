//! Monte Carlo harness: ensembles, stationary histograms, hitting times.
//!
//! Paths run in parallel but their summaries are combined in path order, so
//! results do not depend on the number of threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::histogram::Histogram2;
use super::noise::NoiseStream;
use super::path::{check_grid, simulate_with, NoiseCoupling, SdeScheme};
use crate::error::{Error, Result};
use crate::model::{ModelParams, State};
use crate::qualitative::{stochastic_label, StochasticRegime};

pub const EXTINCTION_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub scheme: SdeScheme,
    #[serde(default)]
    pub coupling: NoiseCoupling,
    pub h: f64,
    pub t_max: f64,
    pub checkpoints: Vec<f64>,
    /// Occupation before this time is left out of the histogram.
    pub burn_in: f64,
    pub bins: usize,
}

impl EnsembleConfig {
    pub fn new(scheme: SdeScheme, h: f64, t_max: f64) -> Self {
        Self {
            scheme,
            coupling: NoiseCoupling::Independent,
            h,
            t_max,
            checkpoints: vec![t_max],
            burn_in: 0.0,
            bins: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointStats {
    pub t: f64,
    pub mean: [f64; 2],
    /// Sample variance; zero for a single path.
    pub var: [f64; 2],
    /// Ensemble mean of `x^2` and `y^2`.
    pub second_moment: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtinctionFractions {
    pub x: f64,
    pub y: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n_paths: usize,
    pub seed0: u64,
    pub checkpoints: Vec<CheckpointStats>,
    pub extinction: ExtinctionFractions,
    /// Each path contributes unit mass spread over its post-burn-in states.
    pub histogram: Histogram2,
}

struct PathSummary {
    at_checkpoints: Vec<State>,
    last: State,
    hist: Histogram2,
}

fn checkpoint_steps(cfg: &EnsembleConfig, n: usize) -> Result<Vec<usize>> {
    cfg.checkpoints
        .iter()
        .map(|&t| {
            if t >= 0.0 && t <= cfg.t_max {
                Ok(((t / cfg.h).round() as usize).min(n))
            } else {
                Err(Error::InvalidParams(format!(
                    "checkpoint {t} outside [0, {}]",
                    cfg.t_max
                )))
            }
        })
        .collect()
}

fn run_summary(
    p: &ModelParams,
    init: State,
    cfg: &EnsembleConfig,
    seed: u64,
    n: usize,
    steps: &[usize],
) -> Result<PathSummary> {
    let mut at = vec![State::new(f64::NAN, f64::NAN); steps.len()];
    let mut hist = Histogram2::new(cfg.bins);
    let mut last = init;
    let first_binned = (cfg.burn_in / cfg.h).ceil() as usize;
    let mut noise = NoiseStream::new(seed);
    simulate_with(p, init, cfg.scheme, cfg.coupling, &mut noise, cfg.h, n, |k, s| {
        for (slot, &ks) in at.iter_mut().zip(steps) {
            if ks == k {
                *slot = s;
            }
        }
        if k >= first_binned {
            hist.add(s, 1.0);
        }
        last = s;
        true
    })?;
    hist.normalize_to(1.0);
    Ok(PathSummary {
        at_checkpoints: at,
        last,
        hist,
    })
}

pub fn ensemble(
    p: &ModelParams,
    init: State,
    cfg: &EnsembleConfig,
    n_paths: usize,
    seed0: u64,
) -> Result<EnsembleStats> {
    if n_paths == 0 {
        return Err(Error::InvalidParams("n_paths must be at least 1".into()));
    }
    if cfg.bins == 0 {
        return Err(Error::InvalidParams("bins must be at least 1".into()));
    }
    let n = check_grid(cfg.h, cfg.t_max)?;
    if !(cfg.burn_in >= 0.0 && cfg.burn_in < cfg.t_max) {
        return Err(Error::InvalidParams(format!(
            "burn-in {} must lie in [0, t_max)",
            cfg.burn_in
        )));
    }
    let steps = checkpoint_steps(cfg, n)?;

    let summaries: Vec<Result<PathSummary>> = (0..n_paths)
        .into_par_iter()
        .map(|i| run_summary(p, init, cfg, seed0.wrapping_add(i as u64), n, &steps))
        .collect();

    let mut done = Vec::with_capacity(n_paths);
    for (i, r) in summaries.into_iter().enumerate() {
        done.push(r.map_err(|e| Error::Path {
            index: i,
            source: Box::new(e),
        })?);
    }

    let np = n_paths as f64;
    let checkpoints = steps
        .iter()
        .enumerate()
        .map(|(c, &k)| {
            let xs: Vec<State> = done.iter().map(|d| d.at_checkpoints[c]).collect();
            let mean = [
                xs.iter().map(|s| s.x).sum::<f64>() / np,
                xs.iter().map(|s| s.y).sum::<f64>() / np,
            ];
            let second_moment = [
                xs.iter().map(|s| s.x * s.x).sum::<f64>() / np,
                xs.iter().map(|s| s.y * s.y).sum::<f64>() / np,
            ];
            let var = if n_paths > 1 {
                [
                    xs.iter().map(|s| (s.x - mean[0]).powi(2)).sum::<f64>() / (np - 1.0),
                    xs.iter().map(|s| (s.y - mean[1]).powi(2)).sum::<f64>() / (np - 1.0),
                ]
            } else {
                [0.0, 0.0]
            };
            CheckpointStats {
                t: k as f64 * cfg.h,
                mean,
                var,
                second_moment,
            }
        })
        .collect();

    let extinct = |f: fn(&State) -> f64| {
        done.iter().filter(|d| f(&d.last) < EXTINCTION_THRESHOLD).count() as f64 / np
    };
    let extinction = ExtinctionFractions {
        x: extinct(|s| s.x),
        y: extinct(|s| s.y),
        threshold: EXTINCTION_THRESHOLD,
    };

    let mut histogram = Histogram2::new(cfg.bins);
    for d in &done {
        histogram.accumulate(&d.hist);
    }

    Ok(EnsembleStats {
        n_paths,
        seed0,
        checkpoints,
        extinction,
        histogram,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryConfig {
    pub scheme: SdeScheme,
    pub h: f64,
    pub burn_in: f64,
    pub t_max: f64,
    pub bins: usize,
    pub seed: u64,
    /// Seed of the second path used for the uniqueness check.
    pub second_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    pub regime: StochasticRegime,
    pub warning: Option<String>,
    /// Unit-mass occupation histogram of the first seed after burn-in.
    pub histogram: Histogram2,
    /// Total variation between the first and second halves of the window.
    pub half_distance: f64,
    /// Total variation between the histograms of the two seeds.
    pub cross_seed_distance: f64,
    pub seeds: [u64; 2],
}

fn halves(
    p: &ModelParams,
    init: State,
    cfg: &StationaryConfig,
    seed: u64,
    n: usize,
) -> Result<(Histogram2, Histogram2)> {
    let first = (cfg.burn_in / cfg.h).ceil() as usize;
    let mid = first + (n - first) / 2;
    let (mut a, mut b) = (Histogram2::new(cfg.bins), Histogram2::new(cfg.bins));
    let mut noise = NoiseStream::new(seed);
    simulate_with(p, init, cfg.scheme, NoiseCoupling::Independent, &mut noise, cfg.h, n, |k, s| {
        if k >= first {
            if k < mid {
                a.add(s, 1.0);
            } else {
                b.add(s, 1.0);
            }
        }
        true
    })?;
    Ok((a, b))
}

/// Long-run occupation histogram of one path with ergodicity and uniqueness
/// diagnostics.
pub fn stationary_histogram(
    p: &ModelParams,
    init: State,
    cfg: &StationaryConfig,
) -> Result<StationaryReport> {
    let n = check_grid(cfg.h, cfg.t_max)?;
    if !(cfg.burn_in >= 0.0 && cfg.burn_in < cfg.t_max) || cfg.bins == 0 {
        return Err(Error::InvalidParams(format!(
            "need 0 <= burn-in < t_max and bins >= 1, got burn-in {}, bins {}",
            cfg.burn_in, cfg.bins
        )));
    }
    let regime = stochastic_label(p);
    let warning = (regime != StochasticRegime::Stationary).then(|| {
        format!(
            "regime is {}, not Stationary; no stationary distribution is guaranteed",
            regime.as_str()
        )
    });

    let (r1, r2) = rayon::join(
        || halves(p, init, cfg, cfg.seed, n),
        || halves(p, init, cfg, cfg.second_seed, n),
    );
    let (a1, b1) = r1?;
    let (a2, b2) = r2?;

    let mut h1 = a1.clone();
    h1.accumulate(&b1);
    let mut h2 = a2;
    h2.accumulate(&b2);
    let half_distance = a1.tv_distance(&b1);
    let cross_seed_distance = h1.tv_distance(&h2);
    h1.normalize_to(1.0);

    Ok(StationaryReport {
        regime,
        warning,
        histogram: h1,
        half_distance,
        cross_seed_distance,
        seeds: [cfg.seed, cfg.second_seed],
    })
}

/// Open rectangle `lo < v < hi` per coordinate; infinite bounds are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Target {
    pub fn everywhere() -> Self {
        Self {
            x_lo: f64::NEG_INFINITY,
            x_hi: f64::INFINITY,
            y_lo: f64::NEG_INFINITY,
            y_hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, s: State) -> bool {
        s.x > self.x_lo && s.x < self.x_hi && s.y > self.y_lo && s.y < self.y_hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingStats {
    /// First grid time in the target per path; `t_cap` when never reached.
    pub times: Vec<f64>,
    pub mean: f64,
    pub median: f64,
    pub censored_fraction: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn hitting_time(
    p: &ModelParams,
    scheme: SdeScheme,
    init: State,
    target: Target,
    n_paths: usize,
    seed0: u64,
    h: f64,
    t_cap: f64,
) -> Result<HittingStats> {
    if n_paths == 0 {
        return Err(Error::InvalidParams("n_paths must be at least 1".into()));
    }
    let n = check_grid(h, t_cap)?;
    let runs: Vec<Result<Option<f64>>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut hit = None;
            let mut noise = NoiseStream::new(seed0.wrapping_add(i as u64));
            simulate_with(p, init, scheme, NoiseCoupling::Independent, &mut noise, h, n, |k, s| {
                if target.contains(s) {
                    hit = Some(k as f64 * h);
                    false
                } else {
                    true
                }
            })?;
            Ok(hit)
        })
        .collect();

    let mut times = Vec::with_capacity(n_paths);
    let mut censored = 0usize;
    for (i, r) in runs.into_iter().enumerate() {
        let hit = r.map_err(|e| Error::Path {
            index: i,
            source: Box::new(e),
        })?;
        times.push(hit.unwrap_or_else(|| {
            censored += 1;
            t_cap
        }));
    }
    let mean = times.iter().sum::<f64>() / n_paths as f64;
    let mut sorted = times.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if n_paths % 2 == 1 {
        sorted[n_paths / 2]
    } else {
        0.5 * (sorted[n_paths / 2 - 1] + sorted[n_paths / 2])
    };
    Ok(HittingStats {
        times,
        mean,
        median,
        censored_fraction: censored as f64 / n_paths as f64,
    })
}
