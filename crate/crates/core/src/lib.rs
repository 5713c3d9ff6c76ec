// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Surrogate modeling of spent-fuel characteristics.
//!
//! The crate is organised as a pipeline:
//!
//! - [`oracle`]: a deterministic reduced-order depletion model. It scales a
//!   reference irradiation history to the sampled inputs and integrates a
//!   small nuclide chain through burnup and cooling cycles, producing 53
//!   outputs (decay heat at 25 cooling times and 28 end-of-life nuclide
//!   concentrations).
//! - [`dataset`]: uniform input sampling, labelled data generation,
//!   train/validation/test splits and normalisation.
//! - [`surrogate`]: a from-scratch multilayer perceptron trained with Adam.
//! - [`tuner`]: seeded random hyperparameter search.
//! - [`analysis`]: Monte-Carlo uncertainty quantification and Sobol'
//!   sensitivity indices, runnable against either the surrogate or the oracle.
//! - [`bench`]: timing, the speedup model and calculated-vs-experiment ratios.
//! - [`cli`]: the `snfs` command-line front end.
//!
//! Input vectors are always ordered
//! `(enrichment, burnup, fuel_temp, boron, cooling_days)`.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bench;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod surrogate;
pub mod tuner;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use oracle::{AssemblyInput, Oracle, SnfOutput};

/// Tool version written into every output file header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Number of sampled inputs.
pub const N_INPUTS: usize = 5;
/// Number of decay-heat outputs.
pub const N_DECAY_HEAT: usize = 25;
/// Number of reported nuclide concentrations.
pub const N_NUCLIDES: usize = 28;
/// Total number of outputs.
pub const N_OUTPUTS: usize = N_DECAY_HEAT + N_NUCLIDES;

/// First line written to every delimited-text output.
pub fn file_banner(seed: Option<u64>) -> String {
    match seed {
        Some(s) => format!("# snfs {VERSION} seed={s}"),
        None => format!("# snfs {VERSION}"),
    }
}
