// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Feed-forward ReLU network trained with ADAM, plus the model file format.

pub mod adam;
pub mod metrics;
pub mod mlp;
pub mod train;

use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::NormStats;
use crate::oracle::{AssemblyInput, SnfOutput};
use crate::{Error, Matrix, Result};

pub use adam::{adam_update, Adam, AdamParams, Moments};
pub use metrics::{mse, per_output_mse, per_output_r2, r2};
pub use mlp::{Dense, Gradients, Mlp, MlpArchitecture};
pub use train::{train, train_normalized, TrainConfig, TrainReport};

pub const MODEL_FORMAT: &str = "snfs-mlp-1";

/// Rows per parallel task in batch prediction.
const PREDICT_CHUNK: usize = 256;

/// A network together with the statistics that map raw values to and from
/// its normalised space.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub net: Mlp,
    /// `None` until trained.
    pub norm: Option<NormStats>,
    pub train_seed: u64,
    pub config: Option<TrainConfig>,
    /// Labelled rows behind training and validation.
    pub n_train: usize,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    tool_version: String,
    architecture: MlpArchitecture,
    train_seed: u64,
    n_train: usize,
    config: Option<TrainConfig>,
    norm: Option<NormStats>,
    layers: Vec<Dense>,
}

impl MlpModel {
    /// Freshly initialised, untrained model.
    pub fn init(arch: MlpArchitecture, seed: u64) -> Result<Self> {
        Ok(Self {
            net: Mlp::init(arch, seed)?,
            norm: None,
            train_seed: seed,
            config: None,
            n_train: 0,
        })
    }

    pub fn architecture(&self) -> MlpArchitecture {
        self.net.architecture
    }

    fn norm(&self) -> Result<&NormStats> {
        self.norm.as_ref().ok_or(Error::Untrained)
    }

    /// Raw inputs in, raw outputs out. Large batches are split across the
    /// rayon pool; each row's result does not depend on the split.
    pub fn predict(&self, inputs: &Matrix) -> Result<Matrix> {
        let norm = self.norm()?;
        let x = norm.inputs.normalize(inputs)?;
        let ni = self.net.input_dim();
        let no = self.net.output_dim();
        let chunks: Vec<Result<Vec<f64>>> = x
            .as_slice()
            .par_chunks(PREDICT_CHUNK * ni)
            .map(|c| self.net.forward_batch(c, c.len() / ni))
            .collect();
        let mut data = Vec::with_capacity(inputs.rows() * no);
        for c in chunks {
            data.extend(c?);
        }
        norm.outputs.denormalize(&Matrix::from_vec(inputs.rows(), no, data)?)
    }

    pub fn predict_one(&self, input: &AssemblyInput) -> Result<SnfOutput> {
        let row = Matrix::from_vec(1, crate::N_INPUTS, input.to_array().to_vec())?;
        SnfOutput::from_slice(self.predict(&row)?.row(0))
    }

    /// [`predict_one`](Self::predict_one) with its wall time.
    pub fn predict_timed(&self, input: &AssemblyInput) -> Result<(SnfOutput, Duration)> {
        let t0 = Instant::now();
        let out = self.predict_one(input)?;
        Ok((out, t0.elapsed()))
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            tool_version: crate::VERSION.into(),
            architecture: self.net.architecture,
            train_seed: self.train_seed,
            n_train: self.n_train,
            config: self.config,
            norm: self.norm.clone(),
            layers: self.net.layers.clone(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::Data(e.to_string()))
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Version {
                found: file.format,
                expected: MODEL_FORMAT.into(),
            });
        }
        let arch = file.architecture;
        arch.validate()?;
        let dims = arch.layer_dims();
        let consistent = dims.len() == file.layers.len()
            && dims.iter().zip(&file.layers).all(|(&(i, o), l)| {
                l.in_dim == i && l.out_dim == o && l.weights.len() == i * o && l.biases.len() == o
            });
        if !consistent {
            return Err(Error::parse(path, 0, "layer shapes do not match the architecture"));
        }
        if let Some(n) = &file.norm {
            if n.inputs.mean.len() != arch.input_dim
                || n.inputs.std.len() != arch.input_dim
                || n.outputs.mean.len() != arch.output_dim
                || n.outputs.std.len() != arch.output_dim
            {
                return Err(Error::parse(path, 0, "normalisation statistics do not match the architecture"));
            }
        }
        Ok(Self {
            net: Mlp {
                architecture: arch,
                layers: file.layers,
            },
            norm: file.norm,
            train_seed: file.train_seed,
            config: file.config,
            n_train: file.n_train,
        })
    }
}

pub fn save_model(model: &MlpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<MlpModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MlpModel::from_json(&text, path)
}
