// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::mlp::{Gradients, Mlp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamParams {
    pub fn with_lr(lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates for one flat parameter vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Moments {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl Moments {
    pub fn zeros(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }
}

/// One bias-corrected ADAM update of `params` in place. `t` is the step
/// number after incrementing, so the first call uses `t = 1`.
pub fn adam_update(params: &mut [f64], grads: &[f64], state: &mut Moments, t: u64, hp: &AdamParams) {
    assert_eq!(params.len(), grads.len());
    assert_eq!(params.len(), state.m.len());
    assert!(t >= 1);
    let c1 = 1.0 - hp.beta1.powf(t as f64);
    let c2 = 1.0 - hp.beta2.powf(t as f64);
    for ((p, g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        *m = hp.beta1 * *m + (1.0 - hp.beta1) * g;
        *v = hp.beta2 * *v + (1.0 - hp.beta2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= hp.lr * m_hat / (v_hat.sqrt() + hp.eps);
    }
}

/// Optimiser state for every layer of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub params: AdamParams,
    pub step: u64,
    weights: Vec<Moments>,
    biases: Vec<Moments>,
}

impl Adam {
    pub fn new(net: &Mlp, params: AdamParams) -> Self {
        Self {
            params,
            step: 0,
            weights: net.layers.iter().map(|l| Moments::zeros(l.weights.len())).collect(),
            biases: net.layers.iter().map(|l| Moments::zeros(l.biases.len())).collect(),
        }
    }

    pub fn apply(&mut self, net: &mut Mlp, g: &Gradients) {
        self.step += 1;
        for (l, layer) in net.layers.iter_mut().enumerate() {
            adam_update(&mut layer.weights, &g.weights[l], &mut self.weights[l], self.step, &self.params);
            adam_update(&mut layer.biases, &g.biases[l], &mut self.biases[l], self.step, &self.params);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters_alone() {
        let mut p = vec![1.0, -2.0, 3.5];
        let mut s = Moments::zeros(3);
        adam_update(&mut p, &[0.0; 3], &mut s, 1, &AdamParams::with_lr(1e-3));
        assert_eq!(p, vec![1.0, -2.0, 3.5]);
    }

    #[test]
    fn first_step_has_bias_corrected_magnitude() {
        let hp = AdamParams::with_lr(2.5e-3);
        for g in [1e-9, 1e-4, 0.3, -7.0, 1e6] {
            let mut p = [0.0];
            let mut s = Moments::zeros(1);
            adam_update(&mut p, &[g], &mut s, 1, &hp);
            let want = hp.lr * g.abs() / (g.abs() + hp.eps);
            assert!((p[0].abs() - want).abs() <= 1e-12 * want, "g={g}: {} vs {want}", p[0]);
            assert_eq!(p[0].signum(), -g.signum());
        }
    }

    #[test]
    fn identical_problems_follow_identical_trajectories() {
        let run = || {
            let hp = AdamParams::with_lr(1e-2);
            let mut p = [3.0];
            let mut s = Moments::zeros(1);
            let mut path = Vec::new();
            for t in 1..=200 {
                // minimise (p - 1)^2
                let g = 2.0 * (p[0] - 1.0);
                adam_update(&mut p, &[g], &mut s, t, &hp);
                path.push(p[0]);
            }
            path
        };
        let a = run();
        assert_eq!(a, run());
        assert!((a[199] - 1.0).abs() < (3.0f64 - 1.0).abs());
    }
}
