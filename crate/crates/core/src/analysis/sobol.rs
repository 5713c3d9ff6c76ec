// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Saltelli cross-sampling and first/total-order Sobol' estimators.
//!
//! With base matrices A and B, `AB_i` is A with column i taken from B and
//! `BA_i` is B with column i taken from A. For centred outputs
//!
//! ```text
//! V_i  = mean(f(B) (f(AB_i) - f(A)))          first order
//! VT_i = mean((f(A) - f(AB_i))^2) / 2         total order
//! ```
//!
//! and the mirrored forms with A and B swapped; each index is the average of
//! the two, divided by the pooled variance of f(A) and f(B).

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::uq::UqSpec;
use super::Evaluator;
use crate::{Error, Matrix, Result};

/// Relative variance below which an output counts as constant.
const FLAT_OUTPUT: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    /// Normal, truncated to positive values by rejection.
    PositiveNormal { mean: f64, std: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl Marginal {
    /// Inverse CDF at `u`. A non-positive normal draw is replaced by fresh
    /// uniform draws from `rng` until one is positive.
    fn quantile(&self, u: f64, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Marginal::Uniform { lo, hi } => lo + (hi - lo) * u,
            Marginal::PositiveNormal { mean, std } => {
                let n = Normal::new(mean, std).expect("validated parameters");
                let mut u = u;
                loop {
                    let x = n.inverse_cdf(u);
                    if x > 0.0 {
                        break x;
                    }
                    u = rng.random::<f64>().max(f64::MIN_POSITIVE);
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Marginal::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Marginal::PositiveNormal { mean, std } => mean > 0.0 && std > 0.0 && mean.is_finite() && std.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid marginal {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    A,
    B,
    AB(usize),
    BA(usize),
}

/// Row layout: A, B, AB_1..AB_d, BA_1..BA_d, each `n_base` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SaltelliDesign {
    pub n_base: usize,
    pub dim: usize,
    pub samples: Matrix,
}

impl SaltelliDesign {
    pub fn total_rows(n_base: usize, dim: usize) -> usize {
        n_base * (2 * dim + 2)
    }

    pub fn rows(&self, block: Block) -> Range<usize> {
        let k = match block {
            Block::A => 0,
            Block::B => 1,
            Block::AB(i) => 2 + i,
            Block::BA(i) => 2 + self.dim + i,
        };
        k * self.n_base..(k + 1) * self.n_base
    }
}

/// Largest base size the scrambled sequence supports.
pub const MAX_N_BASE: usize = 1 << 16;

/// Owen-scrambled Sobol' base points, A in dimensions `0..d` and B in
/// `d..2d`, mapped through each marginal's inverse CDF. The seed selects
/// the scramble.
pub fn saltelli_design(n_base: usize, marginals: &[Marginal], seed: u64) -> Result<SaltelliDesign> {
    if n_base < 2 || !n_base.is_power_of_two() || n_base > MAX_N_BASE {
        return Err(Error::Config(format!(
            "n_base {n_base} must be a power of two in [2, {MAX_N_BASE}]"
        )));
    }
    if marginals.is_empty() || 2 * marginals.len() > 256 {
        return Err(Error::Config(format!("{} input dimensions not supported", marginals.len())));
    }
    for m in marginals {
        m.validate()?;
    }
    let d = marginals.len();
    let scramble = (seed ^ (seed >> 32)) as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = |offset: usize, rng: &mut ChaCha8Rng| {
        let mut m = Matrix::zeros(n_base, d);
        for i in 0..n_base {
            for (j, marg) in marginals.iter().enumerate() {
                let u = sobol_burley::sample(i as u32, (offset + j) as u32, scramble) as f64;
                // f32 output: shift to the cell centre so u is never 0
                let u = (u + 0.5f64.powi(25)).min(1.0 - f64::EPSILON);
                m.set(i, j, marg.quantile(u, rng));
            }
        }
        m
    };
    let a = base(0, &mut rng);
    let b = base(d, &mut rng);
    let mut samples = Matrix::zeros(SaltelliDesign::total_rows(n_base, d), d);
    let design = SaltelliDesign {
        n_base,
        dim: d,
        samples: Matrix::zeros(0, d),
    };
    let mut fill = |block: Block, src: &Matrix, swap: Option<(usize, &Matrix)>| {
        for (r, i) in design.rows(block).zip(0..n_base) {
            samples.row_mut(r).copy_from_slice(src.row(i));
            if let Some((col, other)) = swap {
                samples.set(r, col, other.get(i, col));
            }
        }
    };
    fill(Block::A, &a, None);
    fill(Block::B, &b, None);
    for i in 0..d {
        fill(Block::AB(i), &a, Some((i, &b)));
        fill(Block::BA(i), &b, Some((i, &a)));
    }
    Ok(SaltelliDesign { samples, ..design })
}

/// Saltelli design whose marginals are the spec's positive normals.
pub fn saltelli_sample(n_base: usize, spec: &UqSpec) -> Result<SaltelliDesign> {
    spec.validate()?;
    let marginals: Vec<Marginal> = spec
        .center
        .to_array()
        .iter()
        .zip(spec.std_devs())
        .map(|(&mean, std)| Marginal::PositiveNormal { mean, std })
        .collect();
    saltelli_design(n_base, &marginals, spec.seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SobolResult {
    pub evaluator: String,
    pub n_base: usize,
    /// `d x k`, input-major.
    pub s1: Matrix,
    pub st: Matrix,
    pub s1_se: Matrix,
    pub st_se: Matrix,
    /// `false` for outputs with no variance; their indices are reported as 0.
    pub defined: Vec<bool>,
}

impl SobolResult {
    /// Input with the largest total-order index for output `k`.
    pub fn dominant_input(&self, k: usize) -> usize {
        (0..self.st.rows())
            .max_by(|&a, &b| self.st.get(a, k).total_cmp(&self.st.get(b, k)))
            .unwrap_or(0)
    }
}

/// Point estimates of (S1, ST) for one output over the chosen base rows.
fn estimate(design: &SaltelliDesign, f: &[f64], rows: &[usize]) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = rows.len() as f64;
    let ra = design.rows(Block::A).start;
    let rb = design.rows(Block::B).start;
    let mean = rows.iter().map(|&r| f[ra + r] + f[rb + r]).sum::<f64>() / (2.0 * n);
    let var = rows
        .iter()
        .map(|&r| (f[ra + r] - mean).powi(2) + (f[rb + r] - mean).powi(2))
        .sum::<f64>()
        / (2.0 * n);
    if !(var > FLAT_OUTPUT * mean * mean) || var == 0.0 {
        return None;
    }
    let mut s1 = Vec::with_capacity(design.dim);
    let mut st = Vec::with_capacity(design.dim);
    for i in 0..design.dim {
        let rab = design.rows(Block::AB(i)).start;
        let rba = design.rows(Block::BA(i)).start;
        let (mut v1, mut vt) = (0.0, 0.0);
        for &r in rows {
            let (fa, fb) = (f[ra + r] - mean, f[rb + r] - mean);
            let (fab, fba) = (f[rab + r] - mean, f[rba + r] - mean);
            v1 += fb * (fab - fa) + fa * (fba - fb);
            vt += (fa - fab).powi(2) + (fb - fba).powi(2);
        }
        s1.push(v1 / (2.0 * n) / var);
        st.push(vt / (4.0 * n) / var);
    }
    Some((s1, st))
}

/// Indices from evaluations aligned with `design.samples`, with bootstrap
/// standard errors over resampled base rows.
pub fn sobol_indices(
    design: &SaltelliDesign,
    evaluations: &Matrix,
    evaluator: &str,
    resamples: usize,
    seed: u64,
) -> Result<SobolResult> {
    if evaluations.rows() != design.samples.rows() {
        return Err(Error::Dimension(format!(
            "{} evaluations for a design of {} rows",
            evaluations.rows(),
            design.samples.rows()
        )));
    }
    if !evaluations.is_finite() {
        return Err(Error::Data("non-finite evaluations".into()));
    }
    let (d, k) = (design.dim, evaluations.cols());
    let mut out = SobolResult {
        evaluator: evaluator.into(),
        n_base: design.n_base,
        s1: Matrix::zeros(d, k),
        st: Matrix::zeros(d, k),
        s1_se: Matrix::zeros(d, k),
        st_se: Matrix::zeros(d, k),
        defined: vec![false; k],
    };
    let all: Vec<usize> = (0..design.n_base).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boots: Vec<Vec<usize>> = (0..resamples)
        .map(|_| (0..design.n_base).map(|_| rng.random_range(0..design.n_base)).collect())
        .collect();
    for j in 0..k {
        let f = evaluations.column(j);
        let Some((s1, st)) = estimate(design, &f, &all) else {
            continue;
        };
        out.defined[j] = true;
        let mut acc1 = vec![(0.0, 0.0); d];
        let mut acct = vec![(0.0, 0.0); d];
        let mut used = 0.0;
        for rows in &boots {
            if let Some((b1, bt)) = estimate(design, &f, rows) {
                used += 1.0;
                for i in 0..d {
                    acc1[i].0 += b1[i];
                    acc1[i].1 += b1[i] * b1[i];
                    acct[i].0 += bt[i];
                    acct[i].1 += bt[i] * bt[i];
                }
            }
        }
        let se = |(s, s2): (f64, f64)| {
            if used < 2.0 {
                0.0
            } else {
                ((s2 - s * s / used) / (used - 1.0)).max(0.0).sqrt()
            }
        };
        for i in 0..d {
            out.s1.set(i, j, s1[i]);
            out.st.set(i, j, st[i]);
            out.s1_se.set(i, j, se(acc1[i]));
            out.st_se.set(i, j, se(acct[i]));
        }
    }
    Ok(out)
}

/// Builds the design, evaluates it and estimates the indices.
pub fn run_sobol(evaluator: &dyn Evaluator, n_base: usize, spec: &UqSpec, resamples: usize) -> Result<SobolResult> {
    let design = saltelli_sample(n_base, spec)?;
    let values = evaluator.evaluate_batch(&design.samples)?;
    sobol_indices(&design, &values, evaluator.tag(), resamples, spec.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::uq::mean_std;
    use crate::oracle::AssemblyInput;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn uniform(d: usize) -> Vec<Marginal> {
        vec![Marginal::Uniform { lo: 0.0, hi: 1.0 }; d]
    }

    fn eval(design: &SaltelliDesign, f: impl Fn(&[f64]) -> Vec<f64>) -> Matrix {
        let rows: Vec<Vec<f64>> = design.samples.iter_rows().map(f).collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn c20_design_has_1536_rows() {
        let spec = UqSpec::new(AssemblyInput::c20(), 1);
        let d = saltelli_sample(128, &spec).unwrap();
        assert_eq!(d.samples.rows(), 1536);
        assert_eq!(d.samples.cols(), 5);
        assert!(saltelli_sample(100, &spec).is_err());
    }

    #[test]
    fn blocks_are_cross_sampled_exactly() {
        let d = saltelli_design(8, &uniform(3), 4).unwrap();
        let a = d.rows(Block::A);
        let b = d.rows(Block::B);
        for i in 0..3 {
            for (r, (ra, rb)) in d.rows(Block::AB(i)).zip(a.clone().zip(b.clone())) {
                for j in 0..3 {
                    let want = if j == i { d.samples.get(rb, j) } else { d.samples.get(ra, j) };
                    assert_eq!(d.samples.get(r, j), want);
                }
            }
            for (r, (ra, rb)) in d.rows(Block::BA(i)).zip(a.clone().zip(b.clone())) {
                for j in 0..3 {
                    let want = if j == i { d.samples.get(ra, j) } else { d.samples.get(rb, j) };
                    assert_eq!(d.samples.get(r, j), want);
                }
            }
        }
        assert_eq!(d.rows(Block::BA(2)).end, d.samples.rows());
    }

    #[test]
    fn marginals_have_the_requested_spread() {
        let spec = UqSpec::new(AssemblyInput::c20(), 8);
        let d = saltelli_sample(2048, &spec).unwrap();
        let sd = spec.std_devs();
        for (j, c) in spec.center.to_array().iter().enumerate() {
            let col: Vec<f64> = d.rows(Block::A).map(|r| d.samples.get(r, j)).collect();
            let (m, s) = mean_std(&col);
            assert!((m - c).abs() < 4.0 * sd[j] / (2048f64).sqrt());
            assert!((s / sd[j] - 1.0).abs() < 0.07, "dim {j}: {s} vs {}", sd[j]);
        }
        assert!(d.samples.as_slice().iter().all(|v| *v > 0.0));
    }

    #[test]
    fn single_active_input() {
        let d = saltelli_design(1024, &uniform(5), 2).unwrap();
        let y = eval(&d, |x| vec![x[0]]);
        let r = sobol_indices(&d, &y, "f", 100, 0).unwrap();
        for i in 0..5 {
            let want = if i == 0 { 1.0 } else { 0.0 };
            assert!((r.s1.get(i, 0) - want).abs() < 0.02, "S1[{i}] = {}", r.s1.get(i, 0));
            assert!((r.st.get(i, 0) - want).abs() < 0.02, "ST[{i}] = {}", r.st.get(i, 0));
        }
        assert_eq!(r.dominant_input(0), 0);
    }

    /// Analytic first-order and total-order indices of the Ishigami function.
    fn ishigami_indices(a: f64, b: f64) -> ([f64; 3], [f64; 3]) {
        let v1 = 0.5 * (1.0 + b * PI.powi(4) / 5.0).powi(2);
        let v2 = a * a / 8.0;
        let v13 = b * b * PI.powi(8) * (1.0 / 18.0 - 1.0 / 50.0);
        let v = v1 + v2 + v13;
        ([v1 / v, v2 / v, 0.0], [(v1 + v13) / v, v2 / v, v13 / v])
    }

    #[test]
    fn ishigami_matches_analytic_indices() {
        let (a, b) = (7.0, 0.1);
        let (s1_true, st_true) = ishigami_indices(a, b);
        assert!((s1_true[0] - 0.3139).abs() < 1e-4 && (st_true[2] - 0.2437).abs() < 1e-4);
        let m = vec![Marginal::Uniform { lo: -PI, hi: PI }; 3];
        let d = saltelli_design(4096, &m, 2024).unwrap();
        let y = eval(&d, |x| vec![x[0].sin() + a * x[1].sin().powi(2) + b * x[2].powi(4) * x[0].sin()]);
        let r = sobol_indices(&d, &y, "ishigami", 200, 1).unwrap();
        for i in 0..3 {
            assert!((r.s1.get(i, 0) - s1_true[i]).abs() < 0.02, "S1[{i}] {}", r.s1.get(i, 0));
            assert!((r.st.get(i, 0) - st_true[i]).abs() < 0.02, "ST[{i}] {}", r.st.get(i, 0));
            assert!(r.st.get(i, 0) >= r.s1.get(i, 0) - 3.0 * r.s1_se.get(i, 0).max(r.st_se.get(i, 0)));
        }
    }

    #[test]
    fn constant_outputs_are_flagged() {
        let d = saltelli_design(64, &uniform(2), 0).unwrap();
        let y = eval(&d, |x| vec![5.0, x[0] + x[1]]);
        let r = sobol_indices(&d, &y, "f", 20, 0).unwrap();
        assert_eq!(r.defined, vec![false, true]);
        assert_eq!(r.s1.get(0, 0), 0.0);
        assert!(r.s1.as_slice().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn design_is_seeded() {
        let m = uniform(4);
        assert_eq!(saltelli_design(16, &m, 3).unwrap(), saltelli_design(16, &m, 3).unwrap());
        assert_ne!(saltelli_design(16, &m, 3).unwrap(), saltelli_design(16, &m, 4).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        /// Additive functions: S1 sums to about 1 and ST tracks S1.
        #[test]
        fn additive_functions_have_no_interactions(
            w in proptest::collection::vec(0.1f64..3.0, 4),
            seed in any::<u64>(),
        ) {
            let d = saltelli_design(2048, &uniform(4), seed).unwrap();
            let y = eval(&d, |x| vec![x.iter().zip(&w).map(|(a, b)| a * b).sum()]);
            let r = sobol_indices(&d, &y, "f", 100, seed).unwrap();
            let total: f64 = (0..4).map(|i| r.s1.get(i, 0)).sum();
            prop_assert!((total - 1.0).abs() < 0.06, "sum S1 {}", total);
            for i in 0..4 {
                let gap = r.st.get(i, 0) - r.s1.get(i, 0);
                let se = r.s1_se.get(i, 0).max(r.st_se.get(i, 0));
                prop_assert!(gap >= -3.0 * se - 1e-12, "input {} gap {} se {}", i, gap, se);
                prop_assert!(gap.abs() < 0.05, "input {} gap {}", i, gap);
            }
        }
    }
}
