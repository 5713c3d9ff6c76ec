// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Mini-batch ADAM with early stopping on the validation MSE.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{Adam, AdamParams};
use super::metrics::slice_mse;
use super::mlp::{Mlp, MlpArchitecture};
use super::MlpModel;
use crate::dataset::{fit_norm, Dataset, Splits};
use crate::{Error, Matrix, Result};

pub const BATCH_SIZES: [usize; 5] = [8, 16, 32, 64, 128];
pub const LR_RANGE: (f64, f64) = (1e-4, 5e-3);
pub const MAX_EPOCHS: usize = 1000;
/// Number of batch iterations in the trailing validation objective.
pub const TRAILING_WINDOW: usize = 1000;

/// Fields missing from a config file take their [`Default`] values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::new(1e-3, 32, 0)
    }
}

impl TrainConfig {
    pub fn new(learning_rate: f64, batch_size: usize, seed: u64) -> Self {
        Self {
            learning_rate,
            batch_size,
            max_epochs: MAX_EPOCHS,
            patience: 50,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            seed,
        }
    }

    /// Epoch caps below [`MAX_EPOCHS`] are accepted for quick runs.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = LR_RANGE;
        if !(self.learning_rate >= lo && self.learning_rate <= hi) {
            return Err(Error::Config(format!(
                "learning rate {} outside [{lo}, {hi}]",
                self.learning_rate
            )));
        }
        if !BATCH_SIZES.contains(&self.batch_size) {
            return Err(Error::Config(format!(
                "batch size {} not one of {BATCH_SIZES:?}",
                self.batch_size
            )));
        }
        if self.max_epochs == 0 || self.max_epochs > MAX_EPOCHS {
            return Err(Error::Config(format!("max_epochs {} not in 1..={MAX_EPOCHS}", self.max_epochs)));
        }
        if self.patience == 0 {
            return Err(Error::Config("patience must be at least 1".into()));
        }
        let unit = |b: f64| (0.0..1.0).contains(&b);
        if !unit(self.beta1) || !unit(self.beta2) || !(self.eps > 0.0) {
            return Err(Error::Config("ADAM moments need beta in [0, 1) and eps > 0".into()));
        }
        Ok(())
    }

    fn adam(&self) -> AdamParams {
        AdamParams {
            lr: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean training-batch MSE per epoch.
    pub train_loss: Vec<f64>,
    /// Full validation-set MSE after each epoch.
    pub val_loss: Vec<f64>,
    /// Number of epochs run.
    pub stopped_epoch: usize,
    /// 1-based epoch whose weights were kept.
    pub best_epoch: usize,
    pub best_val_mse: f64,
    /// Mean validation-batch MSE over the last [`TRAILING_WINDOW`] batch
    /// iterations. This is the tuning objective.
    pub trailing_val_mse: f64,
    pub iterations: u64,
}

/// Trains on already normalised matrices.
pub fn train_normalized(
    arch: MlpArchitecture,
    config: &TrainConfig,
    x_train: &Matrix,
    y_train: &Matrix,
    x_val: &Matrix,
    y_val: &Matrix,
) -> Result<(Mlp, TrainReport)> {
    config.validate()?;
    arch.validate()?;
    let (ni, no) = (arch.input_dim, arch.output_dim);
    if x_train.cols() != ni || x_val.cols() != ni || y_train.cols() != no || y_val.cols() != no {
        return Err(Error::Dimension("data columns do not match the architecture".into()));
    }
    if x_train.rows() != y_train.rows() || x_val.rows() != y_val.rows() {
        return Err(Error::Dimension("input and target row counts differ".into()));
    }
    if x_train.rows() == 0 || x_val.rows() == 0 {
        return Err(Error::Size("training and validation sets must be non-empty".into()));
    }

    let mut net = Mlp::init(arch, config.seed)?;
    let mut opt = Adam::new(&net, config.adam());
    // shuffling gets its own stream so it does not alias the init draws
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);

    let n = x_train.rows();
    let bs = config.batch_size;
    let n_val = x_val.rows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut xb = Vec::with_capacity(bs * ni);
    let mut yb = Vec::with_capacity(bs * no);
    let mut window: VecDeque<f64> = VecDeque::with_capacity(TRAILING_WINDOW);
    let mut val_cursor = 0usize;

    let mut report = TrainReport {
        train_loss: Vec::new(),
        val_loss: Vec::new(),
        stopped_epoch: 0,
        best_epoch: 0,
        best_val_mse: f64::INFINITY,
        trailing_val_mse: f64::NAN,
        iterations: 0,
    };
    let mut best = net.clone();
    let mut since_best = 0;

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(bs) {
            xb.clear();
            yb.clear();
            for &i in chunk {
                xb.extend_from_slice(x_train.row(i));
                yb.extend_from_slice(y_train.row(i));
            }
            let (loss, g) = net
                .gradients(&xb, &yb, chunk.len())
                .map_err(|_| Error::Diverged { epoch })?;
            opt.apply(&mut net, &g);
            epoch_loss += loss * chunk.len() as f64;
            report.iterations += 1;

            // next validation batch, walking the validation set cyclically
            let take = bs.min(n_val);
            xb.clear();
            yb.clear();
            for k in 0..take {
                let i = (val_cursor + k) % n_val;
                xb.extend_from_slice(x_val.row(i));
                yb.extend_from_slice(y_val.row(i));
            }
            val_cursor = (val_cursor + take) % n_val;
            let vb = slice_mse(&net.forward_batch(&xb, take)?, &yb);
            if !vb.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            if window.len() == TRAILING_WINDOW {
                window.pop_front();
            }
            window.push_back(vb);
        }
        let val = slice_mse(&net.forward_batch(x_val.as_slice(), n_val)?, y_val.as_slice());
        if !val.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        report.train_loss.push(epoch_loss / n as f64);
        report.val_loss.push(val);
        report.stopped_epoch = epoch;
        if val < report.best_val_mse {
            report.best_val_mse = val;
            report.best_epoch = epoch;
            best.clone_from(&net);
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                break;
            }
        }
    }
    report.trailing_val_mse = window.iter().sum::<f64>() / window.len() as f64;
    Ok((best, report))
}

/// Fits normalisation on the training rows, trains, and bundles the result.
pub fn train(ds: &Dataset, splits: &Splits, arch: MlpArchitecture, config: &TrainConfig) -> Result<(MlpModel, TrainReport)> {
    if arch.input_dim != ds.inputs.cols() || arch.output_dim != ds.outputs.cols() {
        return Err(Error::Dimension("architecture does not match the dataset".into()));
    }
    let norm = fit_norm(ds, &splits.train)?;
    let xt = norm.inputs.normalize(&ds.inputs.select_rows(&splits.train))?;
    let yt = norm.outputs.normalize(&ds.outputs.select_rows(&splits.train))?;
    let xv = norm.inputs.normalize(&ds.inputs.select_rows(&splits.val))?;
    let yv = norm.outputs.normalize(&ds.outputs.select_rows(&splits.val))?;
    let (net, report) = train_normalized(arch, config, &xt, &yt, &xv, &yv)?;
    let model = MlpModel {
        net,
        norm: Some(norm),
        train_seed: config.seed,
        config: Some(*config),
        n_train: splits.train.len() + splits.val.len(),
    };
    Ok((model, report))
}
