use missing_ensemble::ensemble::{EnsembleConfig, EnsembleModel};
use missing_ensemble::fuzzy_artmap::FuzzyArtmapConfig;
use missing_ensemble::ga::GaConfig;
use missing_ensemble::harness::stream::{summarize, ENSEMBLE, NN_GA};
use missing_ensemble::harness::{
    inject_missing, stream_eval, synth_generate, Baseline, MissingMode, MissingnessSpec, Outcome, RunReport,
    StreamConfig, SynthKind,
};
use missing_ensemble::mlp::TrainConfig;
use missing_ensemble::Dataset;

struct Fixture {
    ensemble: EnsembleModel,
    baseline: Baseline,
    test: Dataset,
}

fn classification_fixture() -> Fixture {
    let (data, _) = synth_generate(SynthKind::Classification, 600, 17);
    let (train, rest) = data.split(1.0 / 3.0, 17).unwrap();
    let (valid, test) = rest.split(0.5, 18).unwrap();
    let ensemble = EnsembleModel::train(&train, &valid, &EnsembleConfig::classification(8, FuzzyArtmapConfig::default())).unwrap();
    let ae = TrainConfig { max_cycles: 200, ..Default::default() };
    let baseline = Baseline::train_classification(&train, &valid, FuzzyArtmapConfig::default(), 9, &ae).unwrap();
    Fixture { ensemble, baseline, test: test.with_instances(test.instances[..60].to_vec()) }
}

fn small_ga() -> GaConfig {
    GaConfig { population_size: 8, generations: 5, ..Default::default() }
}

#[test]
fn complete_stream_matches_offline_predictions() {
    let f = classification_fixture();
    let report = stream_eval(&f.ensemble, None, &f.test, &StreamConfig::new(MissingnessSpec::none())).unwrap();
    let log = &report.method(ENSEMBLE).unwrap().log;
    assert_eq!(log.len(), f.test.len());
    for (rec, inst) in log.iter().zip(&f.test.instances) {
        assert!(rec.missing.is_empty());
        assert_eq!(rec.outcome, Outcome::Label(f.ensemble.classify_label(inst).unwrap().to_string()));
    }
    assert!(report.method(NN_GA).is_none());
}

#[test]
fn scores_agree_with_the_log_and_replays_repeat() {
    let f = classification_fixture();
    let mut config = StreamConfig::new(MissingnessSpec::mcar(1, 4));
    config.ga = small_ga();
    let first = stream_eval(&f.ensemble, Some(&f.baseline), &f.test, &config).unwrap();
    let stream = inject_missing(&f.test, &config.missing).unwrap();
    for m in &first.methods {
        let again = summarize(&m.method, &stream, &m.log, config.tolerance).unwrap();
        assert_eq!(again.score, m.score);
        assert_eq!(again.unanswerable, m.unanswerable);
        assert!(m.log.iter().all(|r| r.missing.len() == 1));
    }
    let nn_ga = first.method(NN_GA).unwrap();
    assert!(nn_ga.log.iter().all(|r| r.work == 8 + 5 * 7));
    let second = stream_eval(&f.ensemble, Some(&f.baseline), &f.test, &config).unwrap();
    assert_eq!(first.without_timing(), second.without_timing());

    let text = serde_json::to_string(&first).unwrap();
    let back: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, first);
    assert!(first.summary_table().contains(NN_GA));
}

#[test]
fn too_many_missing_features_leave_instances_unanswered() {
    let f = classification_fixture();
    let report = stream_eval(&f.ensemble, None, &f.test, &StreamConfig::new(MissingnessSpec::mcar(3, 1))).unwrap();
    let m = report.method(ENSEMBLE).unwrap();
    assert_eq!(m.unanswerable, f.test.len());
    assert_eq!(m.score, 0.0);
}

#[test]
fn mar_masks_victim_only_below_threshold() {
    let f = classification_fixture();
    let driver = 0;
    let mut values: Vec<f64> = f.test.instances.iter().map(|i| i.value(driver).unwrap()).collect();
    values.sort_by(f64::total_cmp);
    let threshold = values[values.len() / 2];
    let spec = MissingnessSpec { mode: MissingMode::Mar { driver, threshold, victim: 4 }, seed: 0 };
    let report = stream_eval(&f.ensemble, None, &f.test, &StreamConfig::new(spec)).unwrap();
    for rec in &report.method(ENSEMBLE).unwrap().log {
        let below = f.test.instances[rec.index].value(driver).unwrap() < threshold;
        assert_eq!(rec.missing, if below { vec![4] } else { vec![] });
        assert_ne!(rec.outcome, Outcome::Unanswerable);
    }
}

#[test]
fn regression_stream_reports_each_output() {
    let (data, _) = synth_generate(SynthKind::Regression, 300, 3);
    let (train, rest) = data.split(0.5, 3).unwrap();
    let (valid, test) = rest.split(0.5, 4).unwrap();
    let tc = TrainConfig { max_cycles: 150, ..Default::default() };
    let ensemble = EnsembleModel::train(&train, &valid, &EnsembleConfig::regression(2, 5, tc.clone())).unwrap();
    let report = stream_eval(&ensemble, None, &test, &StreamConfig::new(MissingnessSpec::mcar(1, 9))).unwrap();
    let m = report.method(ENSEMBLE).unwrap();
    assert_eq!(m.per_output.len(), 2);
    assert_eq!(m.unanswerable, 0);
    assert!((0.0..=100.0).contains(&m.score));
    let mean = (m.per_output[0] + m.per_output[1]) / 2.0;
    assert!((mean - m.score).abs() < 1e-9);
}
