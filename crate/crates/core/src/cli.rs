// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

//! The `snfs` command line.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags, missing input
//! files, invalid counts), 1 for failures while running. Diagnostics are a
//! single line on stderr.

use std::borrow::Cow;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{self, Evaluator};
use crate::bench;
use crate::dataset::{self, RangeSpec, SplitSpec};
use crate::oracle::{output_names, AssemblyInput, NuclideChain, Oracle, INPUT_NAMES};
use crate::surrogate::{self, load_model, save_model, MlpArchitecture, MlpModel, TrainConfig};
use crate::tuner::{self, SearchSpace};
use crate::{file_banner, Error, Matrix, N_INPUTS};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "SNFS_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "snfs", version, about = "Spent-fuel surrogate modelling pipeline")]
pub struct RunConfig {
    /// Nuclide chain file to use instead of the built-in data.
    #[arg(long, global = true)]
    pub chain: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct EvaluatorArgs {
    /// Trained model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Also run the depletion oracle.
    #[arg(long)]
    pub oracle: bool,
    /// Comma-separated centre (enrichment, burnup, fuel_temp, boron,
    /// cooling_days); defaults to the reference assembly.
    #[arg(long)]
    pub center: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    pub rel_std: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample inputs and label them with the oracle.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Sampling ranges as `lo:hi` pairs in input order.
        #[arg(long)]
        ranges: Option<String>,
    },
    /// Random hyperparameter search.
    Tune {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// TOML file with `[space]` and `[split]` tables.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train one network.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// TOML file with `[architecture]`, `[train]` and `[split]` tables.
        #[arg(long)]
        config: PathBuf,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the training seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Predict from five comma-separated values or an input CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo uncertainty propagation.
    Uq {
        #[command(flatten)]
        eval: EvaluatorArgs,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        /// Bootstrap resamples of each output's standard deviation.
        #[arg(long, default_value_t = 10_000)]
        bootstrap: usize,
    },
    /// Sobol' sensitivity indices.
    Sa {
        #[command(flatten)]
        eval: EvaluatorArgs,
        /// Base sample count, a power of two.
        #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u64).range(2..))]
        n_base: u64,
        /// Bootstrap resamples for standard errors.
        #[arg(long, default_value_t = 200)]
        resamples: usize,
    },
    /// Time the oracle and the model and evaluate the speedup model.
    Bench {
        #[arg(long)]
        model: PathBuf,
        /// Case count for the speedup.
        #[arg(long, default_value_t = 5072, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        probes: u64,
        /// Training wall time in seconds; read from the model's timing file
        /// when omitted.
        #[arg(long)]
        t_train: Option<f64>,
    },
    /// Calculated-over-measured decay heat ratios.
    Compare {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        meas: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ArchSection {
    hidden_layers: usize,
    hidden_dim: usize,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
struct SplitSection {
    seed: Option<u64>,
}

/// Contents of a `train --config` file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainFile {
    architecture: ArchSection,
    train: TrainConfig,
    #[serde(default)]
    split: SplitSection,
}

impl TrainFile {
    pub fn new(arch: MlpArchitecture, train: TrainConfig, split_seed: u64) -> Self {
        Self {
            architecture: ArchSection {
                hidden_layers: arch.hidden_layers,
                hidden_dim: arch.hidden_dim,
            },
            train,
            split: SplitSection { seed: Some(split_seed) },
        }
    }

    pub fn to_toml(&self, seed: u64) -> crate::Result<String> {
        let body = toml::to_string(self).map_err(|e| Error::Config(e.to_string()))?;
        Ok(format!("{}\n{body}", file_banner(Some(seed))))
    }
}

/// Contents of a `tune --config` file.
#[derive(Debug, Clone, Default, Deserialize)]
struct TuneFile {
    #[serde(default)]
    space: SearchSpace,
    #[serde(default)]
    split: SplitSection,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn need_file(path: &Path) -> Outcome {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("no such file: {}", path.display())))
    }
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> crate::Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| {
        let line = e.span().map_or(1, |s| text[..s.start].lines().count().max(1));
        Error::parse(path, line, e.message().to_string())
    })
}

fn write_file(path: &Path, text: &str) -> crate::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_vector(s: &str) -> Option<[f64; N_INPUTS]> {
    let v: Vec<f64> = s.split(',').map(|f| f.trim().parse().ok()).collect::<Option<_>>()?;
    v.try_into().ok()
}

fn parse_ranges(s: &str) -> std::result::Result<RangeSpec, Failure> {
    let pairs: Vec<(f64, f64)> = s
        .split(',')
        .map(|p| {
            let (lo, hi) = p.split_once(':')?;
            Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?))
        })
        .collect::<Option<_>>()
        .ok_or_else(|| usage(format!("invalid --ranges {s:?}: expected five lo:hi pairs")))?;
    let arr: [(f64, f64); N_INPUTS] = pairs
        .try_into()
        .map_err(|_| usage("--ranges needs exactly five lo:hi pairs"))?;
    let r = RangeSpec(arr);
    r.validate().map_err(|e| usage(e.to_string()))?;
    Ok(r)
}

fn center_of(s: Option<&str>) -> std::result::Result<AssemblyInput, Failure> {
    match s {
        None => Ok(AssemblyInput::c20()),
        Some(s) => {
            let v = parse_vector(s).ok_or_else(|| usage(format!("--center {s:?} is not five numbers")))?;
            let c = AssemblyInput::from_slice(&v).map_err(|e| usage(e.to_string()))?;
            c.validate().map_err(|e| usage(e.to_string()))?;
            Ok(c)
        }
    }
}

fn oracle(chain: Option<&Path>) -> crate::Result<Cow<'static, Oracle>> {
    match chain {
        Some(p) => Ok(Cow::Owned(Oracle::new(NuclideChain::from_path(p)?)?)),
        None => Ok(Cow::Borrowed(Oracle::shared())),
    }
}

fn configure_workers() -> Outcome {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| usage(format!("{WORKERS_ENV}={v:?} is not a positive integer")))?;
    // only the first call in a process can size the global pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch_to(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`dispatch`] with explicit output streams.
pub fn dispatch_to<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "snfs: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    let result = configure_workers().and_then(|_| run(&cfg, out));
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "snfs: {m}");
            2
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "snfs: {}", e.to_string().replace('\n', " "));
            1
        }
    }
}

fn run(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    if let Some(c) = &cfg.chain {
        need_file(c)?;
    }
    let chain = cfg.chain.as_deref();
    let io = |e: std::io::Error| Failure::Runtime(Error::io("<stdout>", e));
    match &cfg.command {
        Command::Gen { n, seed, out: path, ranges } => {
            let ranges = match ranges {
                Some(s) => parse_ranges(s)?,
                None => RangeSpec::training(),
            };
            let orc = oracle(chain)?;
            let ds = dataset::generate_with(&orc, *n as usize, &ranges, *seed)?;
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            dataset::save(&ds, path)?;
            writeln!(out, "wrote {} rows to {}", ds.len(), path.display()).map_err(io)?;
        }
        Command::Tune {
            data,
            budget,
            seed,
            out: dir,
            config,
        } => {
            need_file(data)?;
            let file: TuneFile = match config {
                Some(p) => {
                    need_file(p)?;
                    read_toml(p)?
                }
                None => TuneFile::default(),
            };
            let ds = dataset::load(data)?;
            let split_seed = file.split.seed.unwrap_or(*seed);
            let splits = dataset::split(ds.len(), &SplitSpec::new(split_seed))?;
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let log = dir.join("trials.jsonl");
            let r = tuner::search(&ds, &splits, &file.space, *budget as usize, *seed, Some(&log))?;
            let best = r.best_trial();
            let tf = TrainFile::new(best.architecture, best.config, split_seed);
            write_file(&dir.join("best_config.toml"), &tf.to_toml(*seed)?)?;
            save_model(&r.best_model, dir.join("model.json"))?;
            writeln!(
                out,
                "best trial {} of {}: {} x {}, lr {}, batch {}, objective {}",
                best.index,
                r.trials.len(),
                best.architecture.hidden_layers,
                best.architecture.hidden_dim,
                best.config.learning_rate,
                best.config.batch_size,
                best.objective.unwrap_or(f64::NAN)
            )
            .map_err(io)?;
        }
        Command::Train {
            data,
            config,
            out: path,
            seed,
        } => {
            need_file(data)?;
            need_file(config)?;
            let mut file: TrainFile = read_toml(config)?;
            if let Some(s) = seed {
                file.train.seed = *s;
            }
            let ds = dataset::load(data)?;
            let split_seed = file.split.seed.unwrap_or(file.train.seed);
            let splits = dataset::split(ds.len(), &SplitSpec::new(split_seed))?;
            let arch = MlpArchitecture::snf(file.architecture.hidden_layers, file.architecture.hidden_dim);
            let t0 = Instant::now();
            let (model, report) = surrogate::train(&ds, &splits, arch, &file.train)?;
            let seconds = t0.elapsed().as_secs_f64();
            save_model(&model, path)?;

            let mut csv = String::new();
            writeln!(csv, "{}", file_banner(Some(file.train.seed))).unwrap();
            csv.push_str("epoch,train_mse,val_mse\n");
            for (e, (t, v)) in report.train_loss.iter().zip(&report.val_loss).enumerate() {
                writeln!(csv, "{},{t},{v}", e + 1).unwrap();
            }
            write_file(&with_suffix(path, ".report.csv"), &csv)?;
            write_file(
                &with_suffix(path, ".timing.toml"),
                &format!("train_seconds = {seconds}\nn_train = {}\n", model.n_train),
            )?;

            let (r2, mse) = test_scores(&model, &ds, &splits.test)?;
            writeln!(
                out,
                "epochs {} (best {}), val MSE {}, trailing val MSE {}, test R2 {r2}, test MSE {mse}",
                report.stopped_epoch, report.best_epoch, report.best_val_mse, report.trailing_val_mse
            )
            .map_err(io)?;
        }
        Command::Predict {
            model,
            input,
            out: dest,
        } => {
            need_file(model)?;
            let m = load_model(model)?;
            let text = if Path::new(input).is_file() {
                predict_table(&m, Path::new(input))?
            } else {
                let v = parse_vector(input)
                    .ok_or_else(|| usage(format!("--input {input:?} is neither a file nor five numbers")))?;
                let x = AssemblyInput::from_slice(&v).map_err(|e| usage(e.to_string()))?;
                let y = m.predict_one(&x)?.to_vec();
                let mut s = String::from("output,value\n");
                for (name, v) in output_names().iter().zip(y) {
                    writeln!(s, "{name},{v}").unwrap();
                }
                s
            };
            match dest {
                Some(p) => write_file(p, &format!("{}\n{text}", file_banner(None)))?,
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
        }
        Command::Uq { eval, n, bootstrap } => {
            let spec = analysis::UqSpec {
                center: center_of(eval.center.as_deref())?,
                rel_std: eval.rel_std,
                n_samples: *n as usize,
                seed: eval.seed,
                bootstrap: *bootstrap,
            };
            spec.validate().map_err(|e| usage(e.to_string()))?;
            let (model, orc) = evaluators(eval, chain)?;
            let list = eval_list(&model, &orc);
            let results = analysis::run_uq_paired(&list, &spec)?;
            let names = output_names();
            analysis::write_uq(&eval.out, &results, &names, spec.seed)?;
            if results.len() == 2 {
                write_file(&eval.out.join("uq_compare.csv"), &uq_compare(&results, &names, spec.seed))?;
            }
            writeln!(out, "wrote uncertainty tables for {} to {}", tags(&list), eval.out.display()).map_err(io)?;
        }
        Command::Sa { eval, n_base, resamples } => {
            let n_base = *n_base as usize;
            if !n_base.is_power_of_two() {
                return Err(usage(format!("--n-base {n_base} is not a power of two")));
            }
            let spec = analysis::UqSpec {
                center: center_of(eval.center.as_deref())?,
                rel_std: eval.rel_std,
                seed: eval.seed,
                ..analysis::UqSpec::new(AssemblyInput::c20(), eval.seed)
            };
            spec.validate().map_err(|e| usage(e.to_string()))?;
            let (model, orc) = evaluators(eval, chain)?;
            let list = eval_list(&model, &orc);
            let design = analysis::saltelli_sample(n_base, &spec)?;
            let mut results = Vec::new();
            for e in &list {
                let y = e.evaluate_batch(&design.samples)?;
                results.push(analysis::sobol_indices(&design, &y, e.tag(), *resamples, spec.seed)?);
            }
            analysis::write_sobol(&eval.out, &results, &INPUT_NAMES, &output_names(), spec.seed)?;
            writeln!(
                out,
                "wrote Sobol' indices for {} ({} evaluations each) to {}",
                tags(&list),
                design.samples.rows(),
                eval.out.display()
            )
            .map_err(io)?;
        }
        Command::Bench {
            model,
            n,
            probes,
            t_train,
        } => {
            need_file(model)?;
            let m = load_model(model)?;
            let t_train = match t_train {
                Some(t) => *t,
                None => {
                    let side = with_suffix(model, ".timing.toml");
                    if !side.is_file() {
                        return Err(usage(format!("no {} found: pass --t-train", side.display())));
                    }
                    let t: TimingFile = read_toml(&side)?;
                    t.train_seconds
                }
            };
            let orc = oracle(chain)?;
            let times = bench::measure_times(&orc, &m, &AssemblyInput::c20(), *probes as usize)?;
            let measured = times.constants(t_train, m.n_train.max(1));
            let reference = bench::TimeConstants::reference();
            let mut s = String::new();
            writeln!(s, "{}", file_banner(None)).unwrap();
            s.push_str("quantity,measured,reference\n");
            writeln!(s, "t_oracle_s,{},{}", measured.t_oracle, reference.t_oracle).unwrap();
            writeln!(s, "t_oracle_std_s,{},", times.oracle.std).unwrap();
            writeln!(s, "t_eval_s,{},{}", measured.t_eval, reference.t_eval).unwrap();
            writeln!(s, "t_eval_std_s,{},", times.eval.std).unwrap();
            writeln!(s, "t_train_s,{},{}", measured.t_train, reference.t_train).unwrap();
            writeln!(s, "n_train,{},{}", measured.n_train, reference.n_train).unwrap();
            writeln!(
                s,
                "speedup_at_{n},{},{}",
                bench::speedup(*n, &measured)?,
                bench::speedup(*n, &reference)?
            )
            .unwrap();
            let be = |c| bench::break_even(c).map(|v| v.map_or("none".to_string(), |x: f64| x.to_string()));
            writeln!(s, "break_even_n,{},{}", be(&measured)?, be(&reference)?).unwrap();
            out.write_all(s.as_bytes()).map_err(io)?;
        }
        Command::Compare { pred, meas, out: dest } => {
            need_file(pred)?;
            need_file(meas)?;
            let p = bench::read_predictions(pred)?;
            let m = bench::read_measurements(meas)?;
            let text = bench::ce_table(&bench::ce_compare(&p, &m)?);
            match dest {
                Some(d) => write_file(d, &text)?,
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct TimingFile {
    train_seconds: f64,
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Pooled R² and MSE in normalised output space.
pub fn test_scores(model: &MlpModel, ds: &dataset::Dataset, rows: &[usize]) -> crate::Result<(f64, f64)> {
    let norm = model.norm.as_ref().ok_or(Error::Untrained)?;
    let pred = norm.outputs.normalize(&model.predict(&ds.inputs.select_rows(rows))?)?;
    let truth = norm.outputs.normalize(&ds.outputs.select_rows(rows))?;
    Ok((surrogate::r2(&pred, &truth)?, surrogate::mse(&pred, &truth)?))
}

fn predict_table(model: &MlpModel, path: &Path) -> crate::Result<String> {
    let (head, rows) = dataset::read_table(path)?;
    if head.len() < N_INPUTS || head[..N_INPUTS] != INPUT_NAMES {
        return Err(Error::parse(path, 1, format!("first columns must be {}", INPUT_NAMES.join(","))));
    }
    let data: Vec<Vec<f64>> = rows.into_iter().map(|(_, r)| r[..N_INPUTS].to_vec()).collect();
    if data.is_empty() {
        return Err(Error::parse(path, 2, "no input rows"));
    }
    let x = Matrix::from_rows(&data)?;
    let y = model.predict(&x)?;
    let mut s = format!("{}\n", dataset::header().join(","));
    for (xi, yi) in x.iter_rows().zip(y.iter_rows()) {
        let row: Vec<String> = xi.iter().chain(yi).map(|v| v.to_string()).collect();
        writeln!(s, "{}", row.join(",")).unwrap();
    }
    Ok(s)
}

fn evaluators(args: &EvaluatorArgs, chain: Option<&Path>) -> std::result::Result<(Option<MlpModel>, Option<Cow<'static, Oracle>>), Failure> {
    if args.model.is_none() && !args.oracle {
        return Err(usage("give --model, --oracle, or both"));
    }
    let model = match &args.model {
        Some(p) => {
            need_file(p)?;
            Some(load_model(p)?)
        }
        None => None,
    };
    let orc = if args.oracle { Some(oracle(chain)?) } else { None };
    Ok((model, orc))
}

fn eval_list<'a>(model: &'a Option<MlpModel>, orc: &'a Option<Cow<'static, Oracle>>) -> Vec<&'a dyn Evaluator> {
    let mut v: Vec<&dyn Evaluator> = Vec::new();
    if let Some(m) = model {
        v.push(m);
    }
    if let Some(o) = orc {
        v.push(&**o);
    }
    v
}

fn tags(list: &[&dyn Evaluator]) -> String {
    list.iter().map(|e| e.tag()).collect::<Vec<_>>().join(" and ")
}

/// Side-by-side σ/μ of two paired runs.
fn uq_compare(results: &[analysis::UqResult], names: &[String], seed: u64) -> String {
    let (a, b) = (&results[0], &results[1]);
    let mut s = String::new();
    writeln!(s, "{}", file_banner(Some(seed))).unwrap();
    writeln!(s, "output,{0}_rel_std,{1}_rel_std,relative_difference", a.evaluator, b.evaluator).unwrap();
    for (j, name) in names.iter().enumerate() {
        let (x, y) = (a.outputs[j].rel_std, b.outputs[j].rel_std);
        let d = if y == 0.0 { 0.0 } else { (x - y) / y };
        writeln!(s, "{name},{x},{y},{d}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = dispatch_to(std::iter::once("snfs").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_with_two() {
        for args in [
            &["frobnicate"][..],
            &["gen", "--n", "0", "--out", "x.csv"],
            &["gen", "--n", "5", "--out", "x.csv", "--bogus"],
            &["train", "--data", "/nonexistent.csv", "--config", "/nonexistent.toml", "--out", "m.json"],
            &["gen", "--n", "5", "--out", "x.csv", "--ranges", "1:2,3"],
        ] {
            let (code, _, err) = run_args(args);
            assert_eq!(code, 2, "{args:?}");
            assert_eq!(err.lines().count(), 1, "{err}");
        }
    }

    #[test]
    fn uq_needs_an_evaluator() {
        let (code, _, err) = run_args(&["uq", "--out", "/tmp/never"]);
        assert_eq!(code, 2);
        assert!(err.contains("--model"));
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("predict"));
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_vector("1,2,3,4,5"), Some([1.0, 2.0, 3.0, 4.0, 5.0]));
        assert_eq!(parse_vector("1,2,3,4"), None);
        assert!(parse_ranges("1.5:5.5,5:70,750:950,100:1000,50:3200").is_ok());
        assert!(parse_ranges("5.5:1.5,5:70,750:950,100:1000,50:3200").is_err());
        assert!(center_of(Some("3.095,35.72,887,310.72,2068")).is_ok());
        assert!(center_of(Some("3.095,-35.72,887,310.72,2068")).is_err());
    }

    #[test]
    fn train_file_round_trips() {
        let tf = TrainFile::new(MlpArchitecture::snf(2, 300), TrainConfig::new(2e-3, 16, 4), 9);
        let text = tf.to_toml(4).unwrap();
        assert!(text.starts_with("# snfs"));
        let back: TrainFile = toml::from_str(&text).unwrap();
        assert_eq!(back.train, tf.train);
        assert_eq!(back.split.seed, Some(9));
        let partial: TrainFile = toml::from_str(
            "[architecture]\nhidden_layers = 1\nhidden_dim = 64\n[train]\nlearning_rate = 0.001\nbatch_size = 32\n",
        )
        .unwrap();
        assert_eq!(partial.train.max_epochs, 1000);
        assert_eq!(partial.split.seed, None);
    }
}
