// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

use crate::{Error, Matrix, Result};

fn same_shape(pred: &Matrix, target: &Matrix) -> Result<()> {
    if pred.shape() != target.shape() {
        return Err(Error::Dimension(format!(
            "prediction {:?} vs target {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    if pred.rows() == 0 || pred.cols() == 0 {
        return Err(Error::Size("empty matrices".into()));
    }
    Ok(())
}

/// Mean squared error over every element.
pub fn mse(pred: &Matrix, target: &Matrix) -> Result<f64> {
    same_shape(pred, target)?;
    Ok(slice_mse(pred.as_slice(), target.as_slice()))
}

pub(crate) fn slice_mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / a.len() as f64
}

/// Column-wise MSE, in column order.
pub fn per_output_mse(pred: &Matrix, target: &Matrix) -> Result<Vec<f64>> {
    same_shape(pred, target)?;
    let mut acc = vec![0.0; pred.cols()];
    for (p, t) in pred.iter_rows().zip(target.iter_rows()) {
        for ((a, x), y) in acc.iter_mut().zip(p).zip(t) {
            *a += (x - y) * (x - y);
        }
    }
    let n = pred.rows() as f64;
    Ok(acc.into_iter().map(|s| s / n).collect())
}

/// `1 - SSE/SST`, pooled over every output column. SST is taken about each
/// column's own mean.
pub fn r2(pred: &Matrix, target: &Matrix) -> Result<f64> {
    same_shape(pred, target)?;
    let (sse, sst) = column_sums(pred, target)
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (e, t)| (a + e, b + t));
    if sst <= 0.0 {
        return Err(Error::Undefined("R² of a target with zero variance".into()));
    }
    Ok(1.0 - sse / sst)
}

/// R² of every column; `None` where that column is constant.
pub fn per_output_r2(pred: &Matrix, target: &Matrix) -> Result<Vec<Option<f64>>> {
    same_shape(pred, target)?;
    Ok(column_sums(pred, target)
        .into_iter()
        .map(|(e, t)| (t > 0.0).then(|| 1.0 - e / t))
        .collect())
}

fn column_sums(pred: &Matrix, target: &Matrix) -> Vec<(f64, f64)> {
    let cols = target.cols();
    let n = target.rows() as f64;
    let mut mean = vec![0.0; cols];
    for row in target.iter_rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut out = vec![(0.0, 0.0); cols];
    for (p, t) in pred.iter_rows().zip(target.iter_rows()) {
        for j in 0..cols {
            out[j].0 += (p[j] - t[j]) * (p[j] - t[j]);
            out[j].1 += (t[j] - mean[j]) * (t[j] - mean[j]);
        }
    }
    out
}
