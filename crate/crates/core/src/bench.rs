// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! Cost accounting for the surrogate and comparison of predicted decay heat
//! with measurements.
//!
//! Running `n` cases directly costs `n * t_oracle`. The surrogate costs
//! `t_train + n * t_eval + n_train * t_oracle`, the last term being the
//! training-set generation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::oracle::{AssemblyInput, Oracle};
use crate::surrogate::MlpModel;
use crate::{Error, Result};

/// Calls discarded before timing starts.
pub const WARMUP_CALLS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeConstants {
    /// Seconds per oracle run.
    pub t_oracle: f64,
    /// Seconds to train the surrogate.
    pub t_train: f64,
    /// Seconds per surrogate prediction.
    pub t_eval: f64,
    /// Oracle runs spent on training data.
    pub n_train: usize,
}

impl TimeConstants {
    /// Timings reported for the reference lattice code on a Xeon Gold 6152
    /// with a 500-sample training set.
    pub fn reference() -> Self {
        Self {
            t_oracle: 58.0,
            t_train: 105.0,
            t_eval: 5e-4,
            n_train: 500,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.t_oracle) || !pos(self.t_train) || !pos(self.t_eval) || self.n_train == 0 {
            return Err(Error::Config(format!("time constants must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Direct cost over surrogate cost for `n` cases.
pub fn speedup(n: u64, c: &TimeConstants) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("case count must be at least 1".into()));
    }
    c.validate()?;
    let n = n as f64;
    Ok(n * c.t_oracle / (c.t_train + n * c.t_eval + c.n_train as f64 * c.t_oracle))
}

/// Case count at which both routes cost the same, or `None` when a
/// prediction is no cheaper than an oracle run.
pub fn break_even(c: &TimeConstants) -> Result<Option<f64>> {
    c.validate()?;
    if c.t_oracle <= c.t_eval {
        return Ok(None);
    }
    Ok(Some((c.t_train + c.n_train as f64 * c.t_oracle) / (c.t_oracle - c.t_eval)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Seconds.
    pub mean: f64,
    pub std: f64,
    pub samples: usize,
}

/// Wall-clock statistics of `f` over `n_probe` calls after the warm-up.
pub fn time_calls(n_probe: usize, mut f: impl FnMut() -> Result<()>) -> Result<Timing> {
    if n_probe == 0 {
        return Err(Error::Config("at least one probe is needed".into()));
    }
    for _ in 0..WARMUP_CALLS {
        f()?;
    }
    let mut t = Vec::with_capacity(n_probe);
    for _ in 0..n_probe {
        let start = Instant::now();
        f()?;
        t.push(start.elapsed().as_secs_f64());
    }
    let (mean, std) = crate::analysis::mean_std(&t);
    Ok(Timing {
        mean,
        std,
        samples: n_probe,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredTimes {
    pub oracle: Timing,
    pub eval: Timing,
}

impl MeasuredTimes {
    pub fn constants(&self, t_train: f64, n_train: usize) -> TimeConstants {
        TimeConstants {
            t_oracle: self.oracle.mean,
            t_train,
            t_eval: self.eval.mean,
            n_train,
        }
    }
}

/// Times single oracle runs and single predictions at `input`. Training
/// time is measured separately when the model is built.
pub fn measure_times(oracle: &Oracle, model: &MlpModel, input: &AssemblyInput, n_probe: usize) -> Result<MeasuredTimes> {
    let oracle_t = time_calls(n_probe, || oracle.simulate(input).map(drop))?;
    let eval_t = time_calls(n_probe, || model.predict_one(input).map(drop))?;
    Ok(MeasuredTimes {
        oracle: oracle_t,
        eval: eval_t,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub assembly_id: String,
    pub group: String,
    pub cooling_years: f64,
    /// W/tU.
    pub decay_heat: f64,
}

pub const MEASUREMENT_HEADER: [&str; 4] = ["assembly_id", "group", "cooling_years", "decay_heat_W_per_tU"];
pub const PREDICTION_HEADER: [&str; 2] = ["assembly_id", "decay_heat_W_per_tU"];

/// Non-comment lines of a delimited file after checking its header.
fn data_lines<'a>(path: &Path, text: &'a str, header: &[&str]) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (no, head) = lines.next().ok_or_else(|| Error::parse(path, 0, "missing header"))?;
    let cols: Vec<&str> = head.split(',').map(str::trim).collect();
    if cols != header {
        return Err(Error::parse(path, no, format!("expected header {}", header.join(","))));
    }
    Ok(lines
        .map(|(no, l)| (no, l.split(',').map(str::trim).collect::<Vec<_>>()))
        .collect())
}

fn positive(path: &Path, line: usize, field: &str, what: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(Error::parse(path, line, format!("{what} {field:?} is not a positive number"))),
    }
}

pub fn read_measurements(path: &Path) -> Result<Vec<MeasurementRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    data_lines(path, &text, &MEASUREMENT_HEADER)?
        .into_iter()
        .map(|(no, f)| {
            if f.len() != 4 {
                return Err(Error::parse(path, no, format!("expected 4 fields, found {}", f.len())));
            }
            Ok(MeasurementRecord {
                assembly_id: f[0].to_string(),
                group: f[1].to_string(),
                cooling_years: positive(path, no, f[2], "cooling time")?,
                decay_heat: positive(path, no, f[3], "decay heat")?,
            })
        })
        .collect()
}

pub fn read_predictions(path: &Path) -> Result<BTreeMap<String, f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeMap::new();
    for (no, f) in data_lines(path, &text, &PREDICTION_HEADER)? {
        if f.len() != 2 {
            return Err(Error::parse(path, no, format!("expected 2 fields, found {}", f.len())));
        }
        if out.insert(f[0].to_string(), positive(path, no, f[1], "decay heat")?).is_some() {
            return Err(Error::parse(path, no, format!("duplicate assembly {:?}", f[0])));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeRecord {
    pub assembly_id: String,
    pub group: String,
    pub cooling_years: f64,
    pub calculated: f64,
    pub measured: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupBias {
    pub group: String,
    pub count: usize,
    /// `mean(C/E - 1) * 100`.
    pub bias_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeReport {
    /// Sorted by group, then assembly id, then cooling time.
    pub records: Vec<CeRecord>,
    /// Sorted by group name.
    pub groups: Vec<GroupBias>,
}

pub fn ce_compare(predictions: &BTreeMap<String, f64>, measurements: &[MeasurementRecord]) -> Result<CeReport> {
    let mut missing: Vec<String> = measurements
        .iter()
        .filter(|m| !predictions.contains_key(&m.assembly_id))
        .map(|m| m.assembly_id.clone())
        .collect();
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(Error::MissingPredictions(missing));
    }
    let mut records = Vec::with_capacity(measurements.len());
    for m in measurements {
        let c = predictions[&m.assembly_id];
        if !(c > 0.0 && m.decay_heat > 0.0) {
            return Err(Error::Data(format!("non-positive decay heat for {}", m.assembly_id)));
        }
        records.push(CeRecord {
            assembly_id: m.assembly_id.clone(),
            group: m.group.clone(),
            cooling_years: m.cooling_years,
            calculated: c,
            measured: m.decay_heat,
            ratio: c / m.decay_heat,
        });
    }
    records.sort_by(|a, b| {
        (&a.group, &a.assembly_id)
            .cmp(&(&b.group, &b.assembly_id))
            .then(a.cooling_years.total_cmp(&b.cooling_years))
            .then(a.ratio.total_cmp(&b.ratio))
    });
    let mut by_group: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in &records {
        by_group.entry(&r.group).or_default().push(r.ratio - 1.0);
    }
    let groups = by_group
        .into_iter()
        .map(|(g, devs)| GroupBias {
            group: g.to_string(),
            count: devs.len(),
            bias_percent: devs.iter().sum::<f64>() / devs.len() as f64 * 100.0,
        })
        .collect();
    Ok(CeReport { records, groups })
}

pub fn ce_table(report: &CeReport) -> String {
    let mut s = String::new();
    writeln!(s, "{}", crate::file_banner(None)).unwrap();
    s.push_str("assembly_id,group,cooling_years,calculated_W_per_tU,measured_W_per_tU,c_over_e\n");
    for r in &report.records {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            r.assembly_id, r.group, r.cooling_years, r.calculated, r.measured, r.ratio
        )
        .unwrap();
    }
    s.push_str("\ngroup,count,bias_percent\n");
    for g in &report.groups {
        writeln!(s, "{},{},{}", g.group, g.count, g.bias_percent).unwrap();
    }
    s
}
