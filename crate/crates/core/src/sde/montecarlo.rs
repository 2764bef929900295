use rayon::prelude::*;
use serde::Serialize;

use super::{simulate_terminal, SdeConfig};
use crate::error::{invalid, Result};
use crate::geometry::{orbit_distance, FourierModes, WeakMetricParams};
use crate::seed::mix_seed;

pub const UNIFORM_LABEL: &str = "uniform";
pub const LOCALIZED_LABEL: &str = "localized";
pub const UNRESOLVED_LABEL: &str = "unresolved";

const HISTOGRAM_BINS: usize = 20;

/// A registered equilibrium, given by its Fourier modes at the run cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassTarget {
    pub label: String,
    pub modes: FourierModes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Orbit distance below which a terminal state matches a target.
    pub match_radius: f64,
    /// `|m̂_1|` above which an unmatched terminal counts as localized.
    pub localized_mode1: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            match_radius: 0.1,
            localized_mode1: 0.2,
        }
    }
}

/// Nearest of `λ` and `targets` under the orbit distance if within
/// `match_radius`; otherwise `localized` or `unresolved` by `|m̂_1|`.
pub fn classify(
    modes: &FourierModes,
    targets: &[ClassTarget],
    metric: &WeakMetricParams,
    thresholds: &Thresholds,
) -> Result<String> {
    let lambda = FourierModes::uniform(modes.dim(), modes.k_max())?;
    let mut best = (orbit_distance(modes, &lambda, metric)?, UNIFORM_LABEL);
    for t in targets {
        let d = orbit_distance(modes, &t.modes, metric)?;
        if d < best.0 {
            best = (d, t.label.as_str());
        }
    }
    Ok(if best.0 < thresholds.match_radius {
        best.1.to_string()
    } else if modes.first_mode_abs() > thresholds.localized_mode1 {
        LOCALIZED_LABEL.to_string()
    } else {
        UNRESOLVED_LABEL.to_string()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassFraction {
    pub label: String,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub label: String,
    pub dist_to_lambda: f64,
    pub mode1_abs: f64,
    pub x: [f64; 2],
}

/// Counts of terminal `|m̂_1|` over equal bins of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let edges = (0..=HISTOGRAM_BINS)
            .map(|i| i as f64 / HISTOGRAM_BINS as f64)
            .collect();
        let mut counts = vec![0; HISTOGRAM_BINS];
        for v in values {
            let bin = ((v * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            counts[bin] += 1;
        }
        Self { edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub n_runs: usize,
    pub classes: Vec<ClassFraction>,
    pub seeds: Vec<u64>,
    pub runs: Vec<RunSummary>,
    pub mode1_histogram: Histogram,
}

impl MonteCarloReport {
    pub fn fraction(&self, label: &str) -> f64 {
        self.classes
            .iter()
            .find(|c| c.label == label)
            .map_or(0.0, |c| c.fraction)
    }
}

/// Runs `n_runs` independent copies of `config` with seeds
/// `mix_seed(config.seed, i)` and classifies each terminal state. Runs are
/// distributed over the current rayon pool; results do not depend on its
/// size.
pub fn monte_carlo(
    config: &SdeConfig,
    n_runs: usize,
    targets: &[ClassTarget],
    thresholds: &Thresholds,
) -> Result<MonteCarloReport> {
    if n_runs == 0 {
        return Err(invalid("n_runs", "must be at least 1"));
    }
    config.validate()?;
    let metric = WeakMetricParams::geometric(config.dim(), config.k_max)?;
    let lambda = FourierModes::uniform(config.dim(), config.k_max)?;
    let seeds: Vec<u64> = (0..n_runs as u64)
        .map(|i| mix_seed(config.seed, i))
        .collect();
    let runs = seeds
        .par_iter()
        .map(|&seed| {
            let run_config = SdeConfig {
                seed,
                ..config.clone()
            };
            let state = simulate_terminal(&run_config)?;
            let modes = state.normalized_modes();
            Ok(RunSummary {
                seed,
                label: classify(&modes, targets, &metric, thresholds)?,
                dist_to_lambda: crate::geometry::weak_distance(&modes, &lambda, &metric)?,
                mode1_abs: modes.first_mode_abs(),
                x: state.x,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut labels = vec![UNIFORM_LABEL.to_string()];
    labels.extend(targets.iter().map(|t| t.label.clone()));
    labels.push(LOCALIZED_LABEL.into());
    labels.push(UNRESOLVED_LABEL.into());
    let classes = labels
        .into_iter()
        .map(|label| {
            let count = runs.iter().filter(|r| r.label == label).count();
            ClassFraction {
                fraction: count as f64 / n_runs as f64,
                label,
            }
        })
        .collect();
    Ok(MonteCarloReport {
        n_runs,
        classes,
        seeds,
        mode1_histogram: Histogram::of(runs.iter().map(|r| r.mode1_abs)),
        runs,
    })
}
