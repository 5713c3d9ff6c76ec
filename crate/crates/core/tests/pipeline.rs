// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

use snf_surrogate::analysis::{run_sobol, run_uq, Evaluator, UqSpec};
use snf_surrogate::dataset::{self, SplitSpec};
use snf_surrogate::oracle::{AssemblyInput, Oracle};
use snf_surrogate::surrogate::{self, load_model, save_model, MlpArchitecture, MlpModel, TrainConfig};

fn small_model() -> (MlpModel, dataset::Dataset, dataset::Splits) {
    let ds = dataset::generate(320, 12).unwrap();
    let splits = dataset::split(ds.len(), &SplitSpec::new(12)).unwrap();
    let mut cfg = TrainConfig::new(3e-3, 16, 12);
    cfg.max_epochs = 60;
    let (model, report) = surrogate::train(&ds, &splits, MlpArchitecture::snf(1, 64), &cfg).unwrap();
    assert!(report.stopped_epoch <= 60);
    assert_eq!(model.n_train, splits.train.len() + splits.val.len());
    (model, ds, splits)
}

#[test]
fn trained_model_survives_a_file_round_trip_and_beats_the_mean() {
    let (model, ds, splits) = small_model();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    save_model(&model, &path).unwrap();
    let back = load_model(&path).unwrap();
    let x = ds.inputs.select_rows(&splits.test);
    assert_eq!(model.predict(&x).unwrap(), back.predict(&x).unwrap());

    let (r2, _) = snf_surrogate::cli::test_scores(&back, &ds, &splits.test).unwrap();
    assert!(r2 > 0.5, "test R2 {r2}");
}

#[test]
fn evaluator_batch_matches_single_calls() {
    let (model, ds, _) = small_model();
    let x = ds.inputs.select_rows(&[0, 1, 2, 3]);
    for ev in [&model as &dyn Evaluator, Oracle::shared() as &dyn Evaluator] {
        let batch = ev.evaluate_batch(&x).unwrap();
        for (i, row) in x.iter_rows().enumerate() {
            let one = ev.evaluate(row).unwrap();
            for (a, b) in one.iter().zip(batch.row(i)) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{}", ev.tag());
            }
        }
    }
}

#[test]
fn surrogate_uq_and_sa_are_reproducible() {
    let (model, _, _) = small_model();
    let mut spec = UqSpec::new(AssemblyInput::c20(), 3);
    spec.n_samples = 200;
    spec.bootstrap = 50;
    let a = run_uq(&model, &spec).unwrap();
    let b = run_uq(&model, &spec).unwrap();
    assert_eq!(a.outputs, b.outputs);
    assert!(a.outputs.iter().all(|o| o.std >= 0.0 && o.mean.is_finite()));

    let s1 = run_sobol(&model, 32, &spec, 10).unwrap();
    let s2 = run_sobol(&model, 32, &spec, 10).unwrap();
    assert_eq!(s1.st, s2.st);
    assert_eq!(s1.st.shape(), (5, 53));
}
