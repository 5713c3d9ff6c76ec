// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense ReLU network: forward pass and reverse-mode gradients of the MSE.
//!
//! Weights are row-major `(out_dim, in_dim)`. Batches are row-major
//! `(batch, dim)` slices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpArchitecture {
    pub input_dim: usize,
    pub output_dim: usize,
    pub hidden_layers: usize,
    pub hidden_dim: usize,
}

impl MlpArchitecture {
    /// Five inputs, 53 outputs.
    pub fn snf(hidden_layers: usize, hidden_dim: usize) -> Self {
        Self {
            input_dim: crate::N_INPUTS,
            output_dim: crate::N_OUTPUTS,
            hidden_layers,
            hidden_dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 || self.hidden_dim == 0 || !(1..=5).contains(&self.hidden_layers) {
            return Err(Error::Config(format!("invalid architecture {self:?}")));
        }
        Ok(())
    }

    /// `(in, out)` of every affine layer.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden_layers + 1);
        let mut prev = self.input_dim;
        for _ in 0..self.hidden_layers {
            dims.push((prev, self.hidden_dim));
            prev = self.hidden_dim;
        }
        dims.push((prev, self.output_dim));
        dims
    }

    pub fn parameter_count(&self) -> usize {
        self.layer_dims().iter().map(|(i, o)| i * o + o).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub in_dim: usize,
    pub out_dim: usize,
    /// `out_dim x in_dim`, row-major.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// `c = a * b^T`-style products via `matrixmultiply`. All matrices are
/// described by (rows, cols, row stride, col stride).
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    rsa: isize,
    csa: isize,
    b: &[f64],
    rsb: isize,
    csb: isize,
    beta: f64,
    c: &mut [f64],
) {
    assert!(c.len() >= m * n);
    if m == 0 || n == 0 {
        return;
    }
    assert!(k == 0 || (a.len() >= m * k && b.len() >= k * n));
    // SAFETY: the asserts above bound every access made with these strides;
    // a and b are read-only and c is a unique borrow of m*n contiguous values.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

impl Dense {
    /// `out = x W^T + b` for a `(batch, in_dim)` input.
    fn forward(&self, x: &[f64], batch: usize, out: &mut Vec<f64>) {
        out.clear();
        out.reserve(batch * self.out_dim);
        for _ in 0..batch {
            out.extend_from_slice(&self.biases);
        }
        gemm(
            batch,
            self.in_dim,
            self.out_dim,
            x,
            self.in_dim as isize,
            1,
            &self.weights,
            1,
            self.in_dim as isize,
            1.0,
            out,
        );
    }
}

/// Gradients with the same layout as the model's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.weights.iter().zip(&self.biases).flat_map(|(w, b)| w.iter().chain(b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub architecture: MlpArchitecture,
    pub layers: Vec<Dense>,
}

impl Mlp {
    /// Kaiming-uniform weights, `U(-sqrt(6/fan_in), sqrt(6/fan_in))`, and
    /// zero biases.
    pub fn init(arch: MlpArchitecture, seed: u64) -> Result<Self> {
        arch.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = arch
            .layer_dims()
            .into_iter()
            .map(|(i, o)| {
                let bound = (6.0 / i as f64).sqrt();
                Dense {
                    in_dim: i,
                    out_dim: o,
                    weights: (0..i * o).map(|_| rng.random_range(-bound..bound)).collect(),
                    biases: vec![0.0; o],
                }
            })
            .collect();
        Ok(Self {
            architecture: arch,
            layers,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.architecture.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.architecture.output_dim
    }

    /// Forward pass on a `(batch, input_dim)` slice.
    pub fn forward_batch(&self, x: &[f64], batch: usize) -> Result<Vec<f64>> {
        if x.len() != batch * self.input_dim() {
            return Err(Error::Dimension(format!(
                "batch of {batch} needs {} values, got {}",
                batch * self.input_dim(),
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite network input".into()));
        }
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            layer.forward(&cur, batch, &mut next);
            if l < last {
                next.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    pub fn forward(&self, x: &Matrix) -> Result<Matrix> {
        let out = self.forward_batch(x.as_slice(), x.rows())?;
        Matrix::from_vec(x.rows(), self.output_dim(), out)
    }

    /// MSE over all `batch * output_dim` entries and its gradient with
    /// respect to every weight and bias.
    pub fn gradients(&self, x: &[f64], y: &[f64], batch: usize) -> Result<(f64, Gradients)> {
        if batch == 0 {
            return Err(Error::Size("empty batch".into()));
        }
        if y.len() != batch * self.output_dim() {
            return Err(Error::Dimension(format!(
                "targets hold {} values, expected {}",
                y.len(),
                batch * self.output_dim()
            )));
        }
        if x.len() != batch * self.input_dim() {
            return Err(Error::Dimension("input batch size mismatch".into()));
        }
        // activations[l] is the input to layer l (post-ReLU)
        let mut activations: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_vec());
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::new();
            layer.forward(&activations[l], batch, &mut z);
            if l < last {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            activations.push(z);
        }
        let pred = &activations[self.layers.len()];
        let count = (batch * self.output_dim()) as f64;
        let mut loss = 0.0;
        let mut delta: Vec<f64> = pred
            .iter()
            .zip(y)
            .map(|(p, t)| {
                let r = p - t;
                loss += r * r;
                2.0 * r / count
            })
            .collect();
        loss /= count;
        if !loss.is_finite() {
            return Err(Error::Data("non-finite loss".into()));
        }

        let mut gw = vec![Vec::new(); self.layers.len()];
        let mut gb = vec![Vec::new(); self.layers.len()];
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let (ni, no) = (layer.in_dim, layer.out_dim);
            let input = &activations[l];
            // dW = delta^T (no x batch) * input (batch x ni)
            let mut dw = vec![0.0; no * ni];
            gemm(no, batch, ni, &delta, 1, no as isize, input, ni as isize, 1, 0.0, &mut dw);
            let mut db = vec![0.0; no];
            for row in delta.chunks_exact(no) {
                for (acc, d) in db.iter_mut().zip(row) {
                    *acc += d;
                }
            }
            gw[l] = dw;
            gb[l] = db;
            if l > 0 {
                // d(input) = delta (batch x no) * W (no x ni), masked by ReLU
                let mut dx = vec![0.0; batch * ni];
                gemm(batch, no, ni, &delta, no as isize, 1, &layer.weights, ni as isize, 1, 0.0, &mut dx);
                for (d, a) in dx.iter_mut().zip(input) {
                    if *a <= 0.0 {
                        *d = 0.0;
                    }
                }
                delta = dx;
            }
        }
        Ok((
            loss,
            Gradients {
                weights: gw,
                biases: gb,
            },
        ))
    }
}
