// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

fn snfs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snfs"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn snfs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = snfs(dir, args);
    assert!(o.status.success(), "snfs {args:?}: {}", stderr(&o));
    stdout(&o)
}

const TRAIN_TOML: &str = "[architecture]\nhidden_layers = 1\nhidden_dim = 40\n\n\
[train]\nlearning_rate = 0.003\nbatch_size = 16\nmax_epochs = 30\nseed = 5\n\n[split]\nseed = 5\n";

/// gen + train in `dir`, returning the model path.
fn trained_model(dir: &Path) -> &'static str {
    ok(dir, &["gen", "--n", "260", "--seed", "8", "--out", "data.csv"]);
    std::fs::write(dir.join("train.toml"), TRAIN_TOML).unwrap();
    let msg = ok(dir, &["train", "--data", "data.csv", "--config", "train.toml", "--out", "model.json"]);
    assert!(msg.contains("test R2"), "{msg}");
    "model.json"
}

#[test]
fn usage_errors_exit_2_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &[][..],
        &["frobnicate"][..],
        &["gen", "--n", "0", "--out", "x.csv"][..],
        &["predict", "--model", "missing.json", "--input", "1,2,3,4,5"][..],
        &["uq", "--out", "uq"][..],
    ] {
        let o = snfs(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = stderr(&o);
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn malformed_input_files_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "enrichment_pct,burnup\n1,2\n").unwrap();
    std::fs::write(dir.path().join("t.toml"), TRAIN_TOML).unwrap();
    let o = snfs(dir.path(), &["train", "--data", "bad.csv", "--config", "t.toml", "--out", "m.json"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("bad.csv"));
}

#[test]
fn gen_train_predict_bench() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let model = trained_model(d);
    let data = std::fs::read_to_string(d.join("data.csv")).unwrap();
    assert!(data.lines().any(|l| l.starts_with("enrichment_pct,burnup_MWdkgU,fuel_temp_K,boron_ppm,cooling_days,dh_2y")));
    assert!(d.join("model.json.report.csv").is_file());
    assert!(d.join("model.json.timing.toml").is_file());

    let text = ok(d, &["predict", "--model", model, "--input", "3.7,43.2,887,310,1530"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "output,value");
    assert_eq!(lines.len(), 54);
    assert!(lines[1].starts_with("dh_2y,"));
    assert!(lines[53].starts_with("Sr90,"));
    for l in &lines[1..] {
        let v: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v.is_finite());
    }

    // a table of inputs predicts row by row
    std::fs::write(
        d.join("inputs.csv"),
        "enrichment_pct,burnup_MWdkgU,fuel_temp_K,boron_ppm,cooling_days\n3.7,43.2,887,310,1530\n2.0,20,800,500,100\n",
    )
    .unwrap();
    ok(d, &["predict", "--model", model, "--input", "inputs.csv", "--out", "pred.csv"]);
    let pred = std::fs::read_to_string(d.join("pred.csv")).unwrap();
    let rows: Vec<&str> = pred.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1].split(',').count(), 58);

    let bench = ok(d, &["bench", "--model", model, "--probes", "3", "--t-train", "105"]);
    let reference = bench.lines().find(|l| l.starts_with("speedup_at_5072,")).unwrap();
    let s: f64 = reference.rsplit(',').next().unwrap().parse().unwrap();
    assert!(s > 10.0 && s < 10.2, "{reference}");
}

#[test]
fn paired_uq_and_sa_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let model = trained_model(d);
    let common = ["--model", model, "--oracle", "--seed", "2"];
    ok(d, &[&["uq", "--n", "100", "--bootstrap", "50", "--out", "uq"][..], &common[..]].concat());
    for f in ["uq_summary.csv", "uq_histograms.csv", "uq_compare.csv"] {
        assert!(d.join("uq").join(f).is_file(), "{f}");
    }
    let summary = std::fs::read_to_string(d.join("uq/uq_summary.csv")).unwrap();
    assert!(summary.contains("surrogate_rel_std") && summary.contains("oracle_rel_std"));

    let o = snfs(d, &[&["sa", "--n-base", "12", "--out", "sa"][..], &common[..]].concat());
    assert_eq!(o.status.code(), Some(2));
    let msg = ok(d, &[&["sa", "--n-base", "16", "--resamples", "20", "--out", "sa"][..], &common[..]].concat());
    assert!(msg.contains("192 evaluations"), "{msg}");
    assert!(d.join("sa/sobol_indices.csv").is_file());
}

#[test]
fn compare_reports_ratios_and_missing_ids() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("pred.csv"), "assembly_id,decay_heat_W_per_tU\nA1,110\nA2,90\n").unwrap();
    std::fs::write(
        d.join("meas.csv"),
        "assembly_id,group,cooling_years,decay_heat_W_per_tU\nA1,PWR,20,100\nA2,PWR,21,100\n",
    )
    .unwrap();
    let text = ok(d, &["compare", "--pred", "pred.csv", "--meas", "meas.csv"]);
    assert!(text.contains("A1,PWR,20,110,100,1.1"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("PWR,2,")));

    std::fs::write(
        d.join("meas.csv"),
        "assembly_id,group,cooling_years,decay_heat_W_per_tU\nA1,PWR,20,100\nB7,BWR,21,100\n",
    )
    .unwrap();
    let o = snfs(d, &["compare", "--pred", "pred.csv", "--meas", "meas.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("B7"));
}
