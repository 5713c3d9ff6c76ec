// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Monte-Carlo propagation of independent normal input perturbations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::Evaluator;
use crate::oracle::AssemblyInput;
use crate::{Error, Matrix, Result, N_INPUTS};

/// Upper limit on Freedman-Diaconis bin counts.
pub const MAX_BINS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UqSpec {
    pub center: AssemblyInput,
    /// Standard deviation as a fraction of each centre value.
    pub rel_std: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Bootstrap resamples of the standard deviation estimator.
    pub bootstrap: usize,
}

impl UqSpec {
    pub fn new(center: AssemblyInput, seed: u64) -> Self {
        Self {
            center,
            rel_std: 0.05,
            n_samples: 1000,
            seed,
            bootstrap: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.center.validate()?;
        if !(self.rel_std > 0.0 && self.rel_std.is_finite()) {
            return Err(Error::Config(format!("relative std {} must be positive", self.rel_std)));
        }
        if self.n_samples < 2 {
            return Err(Error::Config("at least two samples are needed".into()));
        }
        Ok(())
    }

    pub fn std_devs(&self) -> [f64; N_INPUTS] {
        self.center.to_array().map(|c| c * self.rel_std)
    }
}

/// Independent normal draws around the centre; non-positive draws are
/// redrawn.
pub fn sample_normal(spec: &UqSpec) -> Result<Matrix> {
    spec.validate()?;
    let center = spec.center.to_array();
    let dists: Vec<Normal<f64>> = center
        .iter()
        .zip(spec.std_devs())
        .map(|(&c, s)| Normal::new(c, s).map_err(|e| Error::Config(e.to_string())))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut m = Matrix::zeros(spec.n_samples, N_INPUTS);
    for i in 0..spec.n_samples {
        for (j, d) in dists.iter().enumerate() {
            let v = loop {
                let v = d.sample(&mut rng);
                if v > 0.0 {
                    break v;
                }
            };
            m.set(i, j, v);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `counts.len() + 1` ascending edges; the last bin is closed.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Freedman-Diaconis edges for the pooled values.
pub fn fd_edges(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return vec![0.0, 1.0];
    }
    v.sort_by(f64::total_cmp);
    let (lo, hi) = (v[0], v[v.len() - 1]);
    if hi <= lo {
        let pad = if lo == 0.0 { 0.5 } else { lo.abs() * 1e-9 };
        return vec![lo - pad, hi + pad];
    }
    let iqr = quantile(&v, 0.75) - quantile(&v, 0.25);
    let width = 2.0 * iqr / (v.len() as f64).cbrt();
    let bins = if width > 0.0 {
        (((hi - lo) / width).ceil() as usize).clamp(1, MAX_BINS)
    } else {
        1
    };
    let step = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|k| lo + step * k as f64).collect();
    edges.push(hi);
    edges
}

pub fn histogram(values: &[f64], edges: &[f64]) -> Histogram {
    let bins = edges.len() - 1;
    let mut counts = vec![0; bins];
    for &x in values {
        // partition_point gives the first edge greater than x
        let k = edges.partition_point(|e| *e <= x);
        let k = k.saturating_sub(1).min(bins - 1);
        counts[k] += 1;
    }
    Histogram {
        edges: edges.to_vec(),
        counts,
    }
}

/// Sample mean and unbiased standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean and variance of the standard deviation over `resamples` bootstrap
/// resamples drawn with replacement.
pub fn bootstrap_std(values: &[f64], resamples: usize, seed: u64) -> Result<(f64, f64)> {
    if values.len() < 2 || resamples == 0 {
        return Err(Error::Size("bootstrap needs at least two values and one resample".into()));
    }
    let n = values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stds = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let (mut s, mut s2) = (0.0, 0.0);
        // shift by the first value to keep the one-pass sums well conditioned
        let shift = values[0];
        for _ in 0..n {
            let v = values[rng.random_range(0..n)] - shift;
            s += v;
            s2 += v * v;
        }
        let var = ((s2 - s * s / n as f64) / (n as f64 - 1.0)).max(0.0);
        stds.push(var.sqrt());
    }
    let (m, sd) = mean_std(&stds);
    Ok((m, sd * sd))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputStats {
    pub mean: f64,
    pub std: f64,
    /// `std / |mean|`, zero when both vanish.
    pub rel_std: f64,
    pub histogram: Histogram,
    pub bootstrap_mean_std: f64,
    pub bootstrap_var_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UqResult {
    pub evaluator: String,
    pub spec: UqSpec,
    pub outputs: Vec<OutputStats>,
    /// `n_samples x k` evaluations, in sample order.
    #[serde(skip)]
    pub values: Matrix,
}

fn summarise(evaluator: &str, spec: &UqSpec, values: Matrix, edges: &[Vec<f64>]) -> Result<UqResult> {
    let mut outputs = Vec::with_capacity(values.cols());
    for (j, col_edges) in edges.iter().enumerate().take(values.cols()) {
        let col = values.column(j);
        let (mean, std) = mean_std(&col);
        let rel_std = if std == 0.0 { 0.0 } else { std / mean.abs() };
        let (bm, bv) = if spec.bootstrap > 0 {
            bootstrap_std(&col, spec.bootstrap, spec.seed ^ (j as u64 + 1))?
        } else {
            (std, 0.0)
        };
        outputs.push(OutputStats {
            mean,
            std,
            rel_std,
            histogram: histogram(&col, col_edges),
            bootstrap_mean_std: bm,
            bootstrap_var_std: bv,
        });
    }
    Ok(UqResult {
        evaluator: evaluator.into(),
        spec: *spec,
        outputs,
        values,
    })
}

/// Evaluates `evaluator` on freshly drawn samples.
pub fn run_uq(evaluator: &dyn Evaluator, spec: &UqSpec) -> Result<UqResult> {
    let samples = sample_normal(spec)?;
    let values = evaluator.evaluate_batch(&samples)?;
    let edges: Vec<Vec<f64>> = (0..values.cols()).map(|j| fd_edges(&values.column(j))).collect();
    summarise(evaluator.tag(), spec, values, &edges)
}

/// Runs every evaluator on the same samples and bins each output on
/// shared edges, so the histograms overlay directly.
pub fn run_uq_paired(evaluators: &[&dyn Evaluator], spec: &UqSpec) -> Result<Vec<UqResult>> {
    let samples = sample_normal(spec)?;
    let all: Vec<Matrix> = evaluators
        .iter()
        .map(|e| e.evaluate_batch(&samples))
        .collect::<Result<_>>()?;
    let k = all.first().map_or(0, |m| m.cols());
    if all.iter().any(|m| m.cols() != k) {
        return Err(Error::Dimension("evaluators disagree on output count".into()));
    }
    let edges: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let pooled: Vec<f64> = all.iter().flat_map(|m| m.column(j)).collect();
            fd_edges(&pooled)
        })
        .collect();
    evaluators
        .iter()
        .zip(all)
        .map(|(e, v)| summarise(e.tag(), spec, v, &edges))
        .collect()
}
