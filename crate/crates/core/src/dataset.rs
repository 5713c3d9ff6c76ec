// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Training data: uniform input sampling, oracle labelling, splits,
//! normalisation and persistence.
//!
//! A dataset is stored as a comma-separated file with a banner comment, a
//! header row (`enrichment_pct, burnup_MWdkgU, fuel_temp_K, boron_ppm,
//! cooling_days, dh_2y, ..., dh_1000y, U234, ..., Sr90`) and one row per
//! sample, plus a `<file>.meta.toml` sidecar holding the seed, sampling
//! ranges and oracle version. Numbers are written in shortest round-trip
//! form so a save/load cycle is bit-exact.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::oracle::{output_names, AssemblyInput, Oracle, INPUT_NAMES};
use crate::{file_banner, Error, Matrix, Result, N_INPUTS, N_OUTPUTS};

/// Per-input sampling interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSpec(pub [(f64, f64); N_INPUTS]);

impl RangeSpec {
    /// Sampling ranges of the training set.
    pub fn training() -> Self {
        RangeSpec([
            (1.5, 5.5),
            (5.0, 70.0),
            (750.0, 950.0),
            (100.0, 1000.0),
            (50.0, 3200.0),
        ])
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in INPUT_NAMES.iter().zip(self.0) {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("range for {name} is [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.0).all(|(v, (lo, hi))| *v >= lo && *v <= hi)
    }
}

impl Default for RangeSpec {
    fn default() -> Self {
        Self::training()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// N x 5, columns in [`INPUT_NAMES`] order.
    pub inputs: Matrix,
    /// N x 53, columns in [`output_names`] order.
    pub outputs: Matrix,
    pub seed: u64,
    pub ranges: RangeSpec,
    pub oracle_version: String,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// I.i.d. uniform samples, one row per assembly.
pub fn sample_inputs(n: usize, ranges: &RangeSpec, seed: u64) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::Config("sample count must be positive".into()));
    }
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Matrix::zeros(n, N_INPUTS);
    for i in 0..n {
        for (j, (lo, hi)) in ranges.0.iter().enumerate() {
            m.set(i, j, lo + (hi - lo) * rng.random::<f64>());
        }
    }
    Ok(m)
}

/// Runs `oracle` on every row. Rows are evaluated in parallel but the
/// result order is the input order; the first failing row aborts the run.
pub fn label(oracle: &Oracle, inputs: &Matrix) -> Result<Matrix> {
    let rows: Vec<Result<Vec<f64>>> = (0..inputs.rows())
        .into_par_iter()
        .map(|i| {
            let x = AssemblyInput::from_slice(inputs.row(i))?;
            oracle.simulate(&x).map(|o| o.to_vec())
        })
        .collect();
    let mut data = Vec::with_capacity(inputs.rows() * N_OUTPUTS);
    for (index, r) in rows.into_iter().enumerate() {
        match r {
            Ok(v) => data.extend(v),
            Err(e) => {
                return Err(Error::Evaluation {
                    index,
                    source: Box::new(e),
                })
            }
        }
    }
    Matrix::from_vec(inputs.rows(), N_OUTPUTS, data)
}

pub fn generate_with(oracle: &Oracle, n: usize, ranges: &RangeSpec, seed: u64) -> Result<Dataset> {
    let inputs = sample_inputs(n, ranges, seed)?;
    let outputs = label(oracle, &inputs)?;
    Ok(Dataset {
        inputs,
        outputs,
        seed,
        ranges: *ranges,
        oracle_version: oracle.version(),
    })
}

/// `n` labelled samples over the default ranges with the shared oracle.
pub fn generate(n: usize, seed: u64) -> Result<Dataset> {
    generate_with(Oracle::shared(), n, &RangeSpec::training(), seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_count: usize,
    pub val_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            test_count: 200,
            val_fraction: 0.2,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// The first `test_count` rows form the test set; the rest are shuffled
/// and divided into training and validation sets.
pub fn split(n_rows: usize, spec: &SplitSpec) -> Result<Splits> {
    if !(spec.val_fraction > 0.0 && spec.val_fraction < 1.0) {
        return Err(Error::Config(format!(
            "validation fraction {} not in (0, 1)",
            spec.val_fraction
        )));
    }
    // at least one training and one validation row must remain
    let rest = n_rows.saturating_sub(spec.test_count);
    let n_val = (rest as f64 * spec.val_fraction).round() as usize;
    if rest < 2 || n_val == 0 || n_val >= rest {
        return Err(Error::Size(format!(
            "{n_rows} rows cannot hold a test set of {} plus train/validation sets",
            spec.test_count
        )));
    }
    let test: Vec<usize> = (0..spec.test_count).collect();
    let mut pool: Vec<usize> = (spec.test_count..n_rows).collect();
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let val = pool.split_off(rest - n_val);
    Ok(Splits {
        train: pool,
        val,
        test,
    })
}

/// Per-column mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ColumnStats {
    /// Statistics of the selected rows. A constant column gets std 1.
    pub fn fit(m: &Matrix, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Size("cannot fit statistics on zero rows".into()));
        }
        let cols = m.cols();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; cols];
        for &i in rows {
            for (acc, v) in mean.iter_mut().zip(m.row(i)) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= n);
        let mut var = vec![0.0; cols];
        for &i in rows {
            for ((acc, v), mu) in var.iter_mut().zip(m.row(i)).zip(&mean) {
                *acc += (v - mu) * (v - mu);
            }
        }
        let std = var
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, std })
    }

    fn check(&self, m: &Matrix) -> Result<()> {
        if m.cols() != self.mean.len() {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, statistics cover {}",
                m.cols(),
                self.mean.len()
            )));
        }
        Ok(())
    }

    /// `(x - mean) / std` column-wise.
    pub fn normalize(&self, m: &Matrix) -> Result<Matrix> {
        self.check(m)?;
        let mut out = m.clone();
        let cols = m.cols();
        for (k, v) in out.as_mut_slice().iter_mut().enumerate() {
            let j = k % cols;
            *v = (*v - self.mean[j]) / self.std[j];
        }
        Ok(out)
    }

    /// `x * std + mean` column-wise.
    pub fn denormalize(&self, m: &Matrix) -> Result<Matrix> {
        self.check(m)?;
        let mut out = m.clone();
        let cols = m.cols();
        for (k, v) in out.as_mut_slice().iter_mut().enumerate() {
            let j = k % cols;
            *v = *v * self.std[j] + self.mean[j];
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub inputs: ColumnStats,
    pub outputs: ColumnStats,
}

/// Normalisation statistics from the training rows only.
pub fn fit_norm(ds: &Dataset, train: &[usize]) -> Result<NormStats> {
    Ok(NormStats {
        inputs: ColumnStats::fit(&ds.inputs, train)?,
        outputs: ColumnStats::fit(&ds.outputs, train)?,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    tool_version: String,
    oracle_version: String,
    seed: u64,
    rows: usize,
    ranges: Vec<[f64; 2]>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.toml");
    PathBuf::from(s)
}

/// Header row of a dataset file.
pub fn header() -> Vec<String> {
    INPUT_NAMES
        .iter()
        .map(|s| s.to_string())
        .chain(output_names())
        .collect()
}

pub fn save(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::new();
    writeln!(text, "{}", file_banner(Some(ds.seed))).unwrap();
    writeln!(text, "{}", header().join(",")).unwrap();
    for i in 0..ds.len() {
        let row: Vec<String> = ds
            .inputs
            .row(i)
            .iter()
            .chain(ds.outputs.row(i))
            .map(|v| v.to_string())
            .collect();
        writeln!(text, "{}", row.join(",")).unwrap();
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;

    let meta = Sidecar {
        tool_version: crate::VERSION.to_string(),
        oracle_version: ds.oracle_version.clone(),
        seed: ds.seed,
        rows: ds.len(),
        ranges: ds.ranges.0.iter().map(|&(lo, hi)| [lo, hi]).collect(),
    };
    let side = sidecar_path(path);
    let text = toml::to_string(&meta).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(&side, text).map_err(|e| Error::io(&side, e))
}

/// Data rows of a table, each with its 1-based line number.
pub type NumberedRows = Vec<(usize, Vec<f64>)>;

/// Reads a numeric table with a header row, skipping `#` comment lines.
/// Returns the header and the rows.
pub fn read_table(path: &Path) -> Result<(Vec<String>, NumberedRows)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, head) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing header row"))?;
    let header: Vec<String> = head.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        let values = fields
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(path, lineno, format!("invalid number {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((lineno, values));
    }
    Ok((header, rows))
}

pub fn load(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let (head, rows) = read_table(path)?;
    if head != header() {
        return Err(Error::parse(path, 1, "unexpected header (column order is fixed)"));
    }
    let side = sidecar_path(path);
    let text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let meta: Sidecar = toml::from_str(&text).map_err(|e| {
        let line = e.span().map_or(1, |s| text[..s.start].lines().count().max(1));
        Error::parse(&side, line, e.message().to_string())
    })?;
    if meta.ranges.len() != N_INPUTS {
        return Err(Error::parse(&side, 1, "ranges must list five intervals"));
    }
    if meta.rows != rows.len() {
        let last = rows.last().map_or(2, |(l, _)| *l);
        return Err(Error::parse(
            path,
            last,
            format!("file holds {} rows, metadata says {}", rows.len(), meta.rows),
        ));
    }
    let mut ranges = [(0.0, 0.0); N_INPUTS];
    for (r, [lo, hi]) in ranges.iter_mut().zip(meta.ranges) {
        *r = (lo, hi);
    }
    let mut inputs = Vec::with_capacity(rows.len() * N_INPUTS);
    let mut outputs = Vec::with_capacity(rows.len() * N_OUTPUTS);
    for (_, r) in &rows {
        inputs.extend_from_slice(&r[..N_INPUTS]);
        outputs.extend_from_slice(&r[N_INPUTS..]);
    }
    Ok(Dataset {
        inputs: Matrix::from_vec(rows.len(), N_INPUTS, inputs)?,
        outputs: Matrix::from_vec(rows.len(), N_OUTPUTS, outputs)?,
        seed: meta.seed,
        ranges: RangeSpec(ranges),
        oracle_version: meta.oracle_version,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn samples_respect_the_training_ranges() {
        let r = RangeSpec::training();
        let m = sample_inputs(1000, &r, 3).unwrap();
        for row in m.iter_rows() {
            assert!(r.contains(row));
            assert!(row[0] >= 1.5 && row[0] <= 5.5);
            assert!(row[1] >= 5.0 && row[1] <= 70.0);
        }
        assert_eq!(m, sample_inputs(1000, &r, 3).unwrap());
        assert_ne!(m, sample_inputs(1000, &r, 4).unwrap());
    }

    #[test]
    fn sample_means_match_uniform_moments() {
        let r = RangeSpec::training();
        let n = 10_000;
        let m = sample_inputs(n, &r, 11).unwrap();
        for (j, (lo, hi)) in r.0.iter().enumerate() {
            let mean = m.column(j).iter().sum::<f64>() / n as f64;
            let tol = 3.0 * (hi - lo) / (12.0 * n as f64).sqrt();
            assert!((mean - 0.5 * (lo + hi)).abs() < tol, "column {j}");
        }
    }

    #[test]
    fn inverted_range_is_a_config_error() {
        let mut r = RangeSpec::training();
        r.0[2] = (950.0, 750.0);
        assert!(matches!(sample_inputs(5, &r, 0), Err(Error::Config(_))));
        assert!(sample_inputs(0, &RangeSpec::training(), 0).is_err());
    }

    #[test]
    fn generate_is_oracle_on_sampled_rows() {
        let ds = generate(5, 9).unwrap();
        assert_eq!(ds.outputs.shape(), (5, N_OUTPUTS));
        assert!(ds.outputs.as_slice().iter().all(|v| *v >= 0.0));
        let x = sample_inputs(5, &RangeSpec::training(), 9).unwrap();
        assert_eq!(ds.inputs, x);
        for i in 0..5 {
            let y = crate::oracle::simulate(&AssemblyInput::from_slice(x.row(i)).unwrap()).unwrap();
            assert_eq!(ds.outputs.row(i), y.to_vec().as_slice());
        }
    }

    #[test]
    fn split_sizes() {
        let s = split(700, &SplitSpec::new(1)).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (400, 100, 200));
        let s = split(2000, &SplitSpec::new(1)).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (1440, 360, 200));
        assert!(matches!(split(201, &SplitSpec::new(1)), Err(Error::Size(_))));
    }

    proptest! {
        #[test]
        fn split_is_a_deterministic_partition(n in 260usize..3000, seed in any::<u64>()) {
            let spec = SplitSpec::new(seed);
            let s = split(n, &spec).unwrap();
            prop_assert_eq!(&s, &split(n, &spec).unwrap());
            let mut all: Vec<usize> = s.train.iter().chain(&s.val).chain(&s.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }

        #[test]
        fn normalize_round_trip(values in proptest::collection::vec(-1e6f64..1e6, 12..60)) {
            let rows = values.len() / 3;
            let m = Matrix::from_vec(rows, 3, values[..rows * 3].to_vec()).unwrap();
            let idx: Vec<usize> = (0..rows).collect();
            let st = ColumnStats::fit(&m, &idx).unwrap();
            let back = st.denormalize(&st.normalize(&m).unwrap()).unwrap();
            for (a, b) in back.as_slice().iter().zip(m.as_slice()) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn population_std_and_constant_guard() {
        let m = Matrix::from_rows(&[[1.0, 7.0], [2.0, 7.0], [3.0, 7.0]]).unwrap();
        let st = ColumnStats::fit(&m, &[0, 1, 2]).unwrap();
        assert!((st.mean[0] - 2.0).abs() < 1e-15);
        assert!((st.std[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!((st.mean[1], st.std[1]), (7.0, 1.0));
        let z = st.normalize(&Matrix::from_rows(std::slice::from_ref(&st.mean)).unwrap()).unwrap();
        assert!(z.as_slice().iter().all(|v| *v == 0.0));
        assert!(matches!(
            st.normalize(&Matrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn normalized_training_columns_are_standard() {
        let m = sample_inputs(300, &RangeSpec::training(), 5).unwrap();
        let idx: Vec<usize> = (0..300).collect();
        let st = ColumnStats::fit(&m, &idx).unwrap();
        let z = st.normalize(&m).unwrap();
        let again = ColumnStats::fit(&z, &idx).unwrap();
        for j in 0..N_INPUTS {
            assert!(again.mean[j].abs() < 1e-10);
            assert!((again.std[j] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn stats_come_from_training_rows_only() {
        let ds = generate(260, 2).unwrap();
        let s = split(ds.len(), &SplitSpec::new(0)).unwrap();
        let train = fit_norm(&ds, &s.train).unwrap();
        let test = fit_norm(&ds, &s.test).unwrap();
        assert_ne!(train.inputs.mean, test.inputs.mean);
        assert_ne!(train.outputs.std, test.outputs.std);
    }

    #[test]
    fn save_load_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.csv");
        let ds = generate(7, 21).unwrap();
        save(&ds, &path).unwrap();
        let back = load(&path).unwrap();
        assert_eq!(back, ds);
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# snfs "));
        let head = lines.next().unwrap();
        assert!(head.starts_with("enrichment_pct,burnup_MWdkgU,fuel_temp_K,boron_ppm,cooling_days,dh_2y,dh_5y,dh_10y,dh_11y"));
        assert!(head.ends_with("Cs137,Sr90"));
    }

    #[test]
    fn truncated_file_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.csv");
        save(&generate(3, 1).unwrap(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let cut = &text[..text.len() - 40];
        std::fs::write(&path, cut).unwrap();
        match load(&path).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 5),
            e => panic!("unexpected {e}"),
        }
    }
}
