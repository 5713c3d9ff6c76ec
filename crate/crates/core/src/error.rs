// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A value outside its physical or mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Non-finite or otherwise inconsistent numerical data.
    #[error("data error: {0}")]
    Data(String),
    #[error("degenerate base history: {0}")]
    DegenerateBase(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported format version {found:?} (expected {expected:?})")]
    Version { found: String, expected: String },
    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Diverged { epoch: usize },
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("model has not been trained (no normalisation statistics)")]
    Untrained,
    #[error("missing predictions for: {}", .0.join(", "))]
    MissingPredictions(Vec<String>),
    #[error("search failed: all {0} trials diverged")]
    SearchFailed(usize),
    #[error("evaluation of sample {index} failed: {source}")]
    Evaluation {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl AsRef<std::path::Path>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.as_ref().display().to_string(),
            line,
            msg: msg.into(),
        }
    }
}
