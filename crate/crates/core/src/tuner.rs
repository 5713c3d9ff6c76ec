// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random search over network shape and optimiser settings.

use std::io::Write;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Splits};
use crate::surrogate::train::{BATCH_SIZES, LR_RANGE, MAX_EPOCHS};
use crate::surrogate::{train, MlpArchitecture, MlpModel, TrainConfig, TrainReport};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpace {
    pub hidden_layers: (usize, usize),
    pub hidden_dim: (usize, usize),
    /// Sampled log-uniformly.
    pub learning_rate: (f64, f64),
    pub batch_sizes: Vec<usize>,
    pub epochs: usize,
    pub patience: usize,
}

impl SearchSpace {
    /// The full domain.
    pub fn full() -> Self {
        Self {
            hidden_layers: (1, 5),
            hidden_dim: (50, 1000),
            learning_rate: LR_RANGE,
            batch_sizes: BATCH_SIZES.to_vec(),
            epochs: MAX_EPOCHS,
            patience: 50,
        }
    }

    /// Any sub-box of [`full`](Self::full) is accepted.
    pub fn validate(&self) -> Result<()> {
        let full = Self::full();
        let within = |(a, b): (usize, usize), (lo, hi): (usize, usize)| a <= b && a >= lo && b <= hi;
        if !within(self.hidden_layers, full.hidden_layers) || !within(self.hidden_dim, full.hidden_dim) {
            return Err(Error::Config("network shape bounds outside the search domain".into()));
        }
        let (a, b) = self.learning_rate;
        if !(a <= b && a >= LR_RANGE.0 && b <= LR_RANGE.1) {
            return Err(Error::Config(format!("learning-rate bounds ({a}, {b}) outside {LR_RANGE:?}")));
        }
        if self.batch_sizes.is_empty() || self.batch_sizes.iter().any(|b| !BATCH_SIZES.contains(b)) {
            return Err(Error::Config(format!("batch sizes must be a non-empty subset of {BATCH_SIZES:?}")));
        }
        if self.epochs == 0 || self.epochs > MAX_EPOCHS || self.patience == 0 {
            return Err(Error::Config("epochs must be in 1..=1000 and patience at least 1".into()));
        }
        Ok(())
    }
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self::full()
    }
}

pub fn sample_from(space: &SearchSpace, rng: &mut impl Rng, seed: u64) -> (MlpArchitecture, TrainConfig) {
    let layers = rng.random_range(space.hidden_layers.0..=space.hidden_layers.1);
    let dim = rng.random_range(space.hidden_dim.0..=space.hidden_dim.1);
    let (lo, hi) = space.learning_rate;
    let lr = if lo == hi { lo } else { 10f64.powf(rng.random_range(lo.log10()..hi.log10())) };
    let batch = *space.batch_sizes.choose(rng).expect("validated non-empty");
    let mut config = TrainConfig::new(lr.clamp(lo, hi), batch, seed);
    config.max_epochs = space.epochs;
    config.patience = space.patience;
    (MlpArchitecture::snf(layers, dim), config)
}

/// One configuration drawn from `space`; the training seed is `seed`.
pub fn sample_config(space: &SearchSpace, seed: u64) -> Result<(MlpArchitecture, TrainConfig)> {
    space.validate()?;
    Ok(sample_from(space, &mut ChaCha8Rng::seed_from_u64(seed), seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub architecture: MlpArchitecture,
    pub config: TrainConfig,
    /// Trailing validation-batch MSE; `None` when training diverged.
    pub objective: Option<f64>,
    pub stopped_epoch: usize,
    pub best_epoch: usize,
    pub best_val_mse: Option<f64>,
}

pub struct SearchResult {
    /// Index into `trials`.
    pub best: usize,
    pub trials: Vec<Trial>,
    pub best_model: MlpModel,
    pub best_report: TrainReport,
}

impl SearchResult {
    pub fn best_trial(&self) -> &Trial {
        &self.trials[self.best]
    }
}

/// Trains `budget` sampled configurations one after another and keeps the
/// one with the lowest objective. When `log` is given, one JSON record per
/// trial is appended after a banner line.
pub fn search(
    ds: &Dataset,
    splits: &Splits,
    space: &SearchSpace,
    budget: usize,
    seed: u64,
    log: Option<&Path>,
) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::Config("search budget must be at least 1".into()));
    }
    space.validate()?;
    let mut writer = match log {
        Some(p) => {
            let mut f = std::fs::File::create(p).map_err(|e| Error::io(p, e))?;
            writeln!(f, "{}", crate::file_banner(Some(seed))).map_err(|e| Error::io(p, e))?;
            Some((p, f))
        }
        None => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trials = Vec::with_capacity(budget);
    let mut best: Option<(usize, MlpModel, TrainReport)> = None;
    for index in 0..budget {
        // 63 bits so the seed survives TOML, whose integers are signed
        let trial_seed = rng.next_u64() >> 1;
        let (mut arch, config) = sample_from(space, &mut rng, trial_seed);
        arch.input_dim = ds.inputs.cols();
        arch.output_dim = ds.outputs.cols();
        let trial = match train(ds, splits, arch, &config) {
            Ok((model, report)) => {
                let t = Trial {
                    index,
                    architecture: arch,
                    config,
                    objective: Some(report.trailing_val_mse),
                    stopped_epoch: report.stopped_epoch,
                    best_epoch: report.best_epoch,
                    best_val_mse: Some(report.best_val_mse),
                };
                let improves = match &best {
                    Some((b, _, _)) => report.trailing_val_mse < trials_objective(&trials, *b),
                    None => true,
                };
                if improves {
                    best = Some((index, model, report));
                }
                t
            }
            Err(Error::Diverged { epoch }) => Trial {
                index,
                architecture: arch,
                config,
                objective: None,
                stopped_epoch: epoch,
                best_epoch: 0,
                best_val_mse: None,
            },
            Err(e) => return Err(e),
        };
        if let Some((p, f)) = writer.as_mut() {
            let line = serde_json::to_string(&trial).map_err(|e| Error::Data(e.to_string()))?;
            writeln!(f, "{line}").map_err(|e| Error::io(*p, e))?;
        }
        trials.push(trial);
    }
    let (best, best_model, best_report) = best.ok_or(Error::SearchFailed(budget))?;
    Ok(SearchResult {
        best,
        trials,
        best_model,
        best_report,
    })
}

fn trials_objective(trials: &[Trial], i: usize) -> f64 {
    trials[i].objective.unwrap_or(f64::INFINITY)
}

/// Best objective seen up to and including each trial.
pub fn running_minimum(trials: &[Trial]) -> Vec<f64> {
    let mut cur = f64::INFINITY;
    trials
        .iter()
        .map(|t| {
            cur = cur.min(t.objective.unwrap_or(f64::INFINITY));
            cur
        })
        .collect()
}

/// Reads a trial log written by [`search`].
pub fn read_trial_log(path: &Path) -> Result<Vec<Trial>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(path, i + 1, e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{split, RangeSpec, SplitSpec};
    use crate::Matrix;

    fn quick_space() -> SearchSpace {
        SearchSpace {
            hidden_layers: (1, 2),
            hidden_dim: (50, 60),
            epochs: 4,
            ..SearchSpace::full()
        }
    }

    fn toy() -> (Dataset, Splits) {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let n = 260;
        let mut inputs = Matrix::zeros(n, 5);
        let mut outputs = Matrix::zeros(n, 3);
        for i in 0..n {
            for j in 0..5 {
                inputs.set(i, j, rng.random::<f64>());
            }
            let r = inputs.row(i).to_vec();
            outputs.set(i, 0, r[0] * r[1]);
            outputs.set(i, 1, r[2] - r[3]);
            outputs.set(i, 2, r[4].sin());
        }
        let ds = Dataset {
            inputs,
            outputs,
            seed: 0,
            ranges: RangeSpec::training(),
            oracle_version: "toy".into(),
        };
        let splits = split(n, &SplitSpec::new(0)).unwrap();
        (ds, splits)
    }

    #[test]
    fn samples_respect_bounds_and_seed() {
        let space = SearchSpace::full();
        for seed in 0..2000 {
            let (arch, cfg) = sample_config(&space, seed).unwrap();
            assert!((1..=5).contains(&arch.hidden_layers));
            assert!((50..=1000).contains(&arch.hidden_dim));
            assert!(cfg.validate().is_ok());
            assert_eq!(cfg.max_epochs, 1000);
            assert_eq!(cfg.seed, seed);
        }
        assert_eq!(sample_config(&space, 5).unwrap(), sample_config(&space, 5).unwrap());
    }

    #[test]
    fn learning_rate_is_log_uniform() {
        let space = SearchSpace::full();
        let (lo, hi) = (1e-4f64.log10(), 5e-3f64.log10());
        let bins = 10;
        let mut counts = vec![0usize; bins];
        let n = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..n {
            let (_, cfg) = sample_from(&space, &mut rng, 0);
            let u = (cfg.learning_rate.log10() - lo) / (hi - lo);
            counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
        }
        // chi-square with 9 degrees of freedom; 27.88 is the 0.999 quantile
        let e = n as f64 / bins as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        assert!(chi2 < 27.88, "chi2 {chi2}, counts {counts:?}");
    }

    #[test]
    fn out_of_domain_spaces_are_rejected() {
        let mut s = SearchSpace::full();
        s.hidden_layers = (1, 6);
        assert!(s.validate().is_err());
        let mut s = SearchSpace::full();
        s.learning_rate = (1e-5, 1e-3);
        assert!(s.validate().is_err());
        let mut s = SearchSpace::full();
        s.batch_sizes = vec![12];
        assert!(s.validate().is_err());
    }

    #[test]
    fn single_trial_is_the_best() {
        let (ds, splits) = toy();
        let r = search(&ds, &splits, &quick_space(), 1, 3, None).unwrap();
        assert_eq!(r.best, 0);
        assert_eq!(r.trials.len(), 1);
        assert!(search(&ds, &splits, &quick_space(), 0, 3, None).is_err());
    }

    #[test]
    fn best_is_argmin_and_search_is_reproducible() {
        let (ds, splits) = toy();
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("trials.jsonl");
        let a = search(&ds, &splits, &quick_space(), 5, 11, Some(&log)).unwrap();
        let best = a.best_trial().objective.unwrap();
        assert!(a.trials.iter().all(|t| best <= t.objective.unwrap()));
        assert_eq!(a.best_report.trailing_val_mse, best);

        let mins = running_minimum(&a.trials);
        assert!(mins.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*mins.last().unwrap(), best);

        let logged = read_trial_log(&log).unwrap();
        assert_eq!(logged, a.trials);

        let b = search(&ds, &splits, &quick_space(), 5, 11, None).unwrap();
        assert_eq!(a.trials, b.trials);
        assert_eq!(a.best_model, b.best_model);
    }
}
