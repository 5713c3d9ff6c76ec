// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Uncertainty propagation and variance-based sensitivity analysis against
//! any [`Evaluator`], so the surrogate and the oracle can be run on the same
//! samples.

pub mod sobol;
pub mod uq;

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::oracle::{AssemblyInput, Oracle};
use crate::surrogate::MlpModel;
use crate::{Error, Matrix, Result};

pub use sobol::{run_sobol, saltelli_design, saltelli_sample, sobol_indices, Block, Marginal, SaltelliDesign, SobolResult};
pub use uq::{bootstrap_std, fd_edges, histogram, mean_std, run_uq, run_uq_paired, sample_normal, Histogram, OutputStats, UqResult, UqSpec};

/// A map from an input row to an output row.
pub trait Evaluator: Sync {
    /// Short label used in output tables.
    fn tag(&self) -> &str;

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Row-wise evaluation in parallel; the first failure aborts with its
    /// row index.
    fn evaluate_batch(&self, inputs: &Matrix) -> Result<Matrix> {
        let rows: Vec<Result<Vec<f64>>> = (0..inputs.rows())
            .into_par_iter()
            .map(|i| self.evaluate(inputs.row(i)))
            .collect();
        let mut out = Vec::with_capacity(rows.len());
        for (index, r) in rows.into_iter().enumerate() {
            out.push(r.map_err(|e| Error::Evaluation {
                index,
                source: Box::new(e),
            })?);
        }
        Matrix::from_rows(&out)
    }
}

impl Evaluator for Oracle {
    fn tag(&self) -> &str {
        "oracle"
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.simulate(&AssemblyInput::from_slice(x)?)?.to_vec())
    }
}

impl Evaluator for MlpModel {
    fn tag(&self) -> &str {
        "surrogate"
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.predict(&Matrix::from_vec(1, x.len(), x.to_vec())?)?.into_vec())
    }

    fn evaluate_batch(&self, inputs: &Matrix) -> Result<Matrix> {
        self.predict(inputs)
    }
}

/// Wraps a closure.
pub struct FnEvaluator<F> {
    tag: String,
    f: F,
}

impl<F> FnEvaluator<F>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    /// `outputs` documents the closure's output length; it is not checked.
    pub fn new(tag: &str, _outputs: usize, f: F) -> Self {
        Self { tag: tag.into(), f }
    }
}

impl<F> Evaluator for FnEvaluator<F>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    fn tag(&self) -> &str {
        &self.tag
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        (self.f)(x)
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One row per output with mean, std, σ/μ and bootstrap summary for every
/// evaluator.
pub fn uq_table(results: &[UqResult], names: &[String], seed: u64) -> Result<String> {
    let k = names.len();
    if results.iter().any(|r| r.outputs.len() != k) {
        return Err(Error::Dimension("result and name counts differ".into()));
    }
    let mut s = String::new();
    writeln!(s, "{}", crate::file_banner(Some(seed))).unwrap();
    s.push_str("output");
    for r in results {
        let t = &r.evaluator;
        write!(s, ",{t}_mean,{t}_std,{t}_rel_std,{t}_boot_mean_std,{t}_boot_var_std").unwrap();
    }
    s.push('\n');
    for (j, name) in names.iter().enumerate() {
        s.push_str(name);
        for r in results {
            let o = &r.outputs[j];
            write!(
                s,
                ",{},{},{},{},{}",
                o.mean, o.std, o.rel_std, o.bootstrap_mean_std, o.bootstrap_var_std
            )
            .unwrap();
        }
        s.push('\n');
    }
    Ok(s)
}

/// Long-format histogram data: one row per (output, evaluator, bin).
pub fn histogram_table(results: &[UqResult], names: &[String], seed: u64) -> String {
    let mut s = String::new();
    writeln!(s, "{}", crate::file_banner(Some(seed))).unwrap();
    s.push_str("output,evaluator,bin,lower,upper,count\n");
    for (j, name) in names.iter().enumerate() {
        for r in results {
            let h = &r.outputs[j].histogram;
            for (b, c) in h.counts.iter().enumerate() {
                writeln!(s, "{name},{},{b},{},{},{c}", r.evaluator, h.edges[b], h.edges[b + 1]).unwrap();
            }
        }
    }
    s
}

/// One row per (output, evaluator, input).
pub fn sobol_table(results: &[SobolResult], inputs: &[&str], names: &[String], seed: u64) -> String {
    let mut s = String::new();
    writeln!(s, "{}", crate::file_banner(Some(seed))).unwrap();
    s.push_str("output,evaluator,input,S1,S1_se,ST,ST_se,defined\n");
    for (j, name) in names.iter().enumerate() {
        for r in results {
            for (i, input) in inputs.iter().enumerate() {
                writeln!(
                    s,
                    "{name},{},{input},{},{},{},{},{}",
                    r.evaluator,
                    r.s1.get(i, j),
                    r.s1_se.get(i, j),
                    r.st.get(i, j),
                    r.st_se.get(i, j),
                    r.defined[j]
                )
                .unwrap();
            }
        }
    }
    s
}

pub fn write_uq(dir: &Path, results: &[UqResult], names: &[String], seed: u64) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_text(&dir.join("uq_summary.csv"), &uq_table(results, names, seed)?)?;
    write_text(&dir.join("uq_histograms.csv"), &histogram_table(results, names, seed))
}

pub fn write_sobol(dir: &Path, results: &[SobolResult], inputs: &[&str], names: &[String], seed: u64) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_text(&dir.join("sobol_indices.csv"), &sobol_table(results, inputs, names, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_have_one_row_per_output() {
        let f = FnEvaluator::new("lin", 2, |x: &[f64]| Ok(vec![x[0], x[1] * 2.0]));
        let spec = UqSpec {
            n_samples: 50,
            bootstrap: 10,
            ..UqSpec::new(AssemblyInput::c20(), 3)
        };
        let r = run_uq_paired(&[&f, &f], &spec).unwrap();
        let names = vec!["a".to_string(), "b".to_string()];
        let t = uq_table(&r, &names, 3).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[0].starts_with("# snfs") && lines[0].ends_with("seed=3"));
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').count(), 11);
        assert!(uq_table(&r, &names[..1], 3).is_err());

        let sa = run_sobol(&f, 16, &spec, 10).unwrap();
        let t = sobol_table(&[sa], &crate::oracle::INPUT_NAMES, &names, 3);
        assert_eq!(t.lines().count(), 2 + 2 * 5);
    }

    #[test]
    fn oracle_batch_reports_failing_row() {
        let mut inputs = Matrix::from_rows(&[AssemblyInput::c20().to_array(); 3]).unwrap();
        inputs.set(2, 1, -4.0);
        match Oracle::shared().evaluate_batch(&inputs) {
            Err(Error::Evaluation { index, .. }) => assert_eq!(index, 2),
            other => panic!("{other:?}"),
        }
    }
}
