//! Online replay: test instances arrive one at a time and each method answers
//! before the next one is seen. Metrics are computed only after the whole
//! stream has been processed.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Instance, Target, Task};
use crate::ensemble::{EnsembleConfig, EnsembleModel};
use crate::error::{Error, Result};
use crate::fuzzy_artmap::FuzzyArtmapConfig;
use crate::ga::GaConfig;
use crate::harness::metrics::{tolerance_accuracy, Tolerance};
use crate::harness::missingness::{inject_missing, MissingnessSpec};
use crate::harness::report::{LatencyStats, MethodReport, RunReport};
use crate::imputer::ImputerModel;
use crate::mlp::TrainConfig;

/// Impute-then-predict pipeline: autoencoder/GA imputer feeding a single
/// full-feature model of the same family as the ensemble members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub imputer: ImputerModel,
    /// Ensemble with `n_avail = n`: exactly one member using every feature.
    pub full_model: EnsembleModel,
}

impl Baseline {
    pub fn train_classification(
        train: &Dataset,
        validation: &Dataset,
        artmap: FuzzyArtmapConfig,
        ae_hidden: usize,
        ae_train: &TrainConfig,
    ) -> Result<Self> {
        let full = EnsembleConfig::classification(train.n_features(), artmap);
        Ok(Baseline {
            imputer: ImputerModel::fit(train, ae_hidden, ae_train)?.0,
            full_model: EnsembleModel::train(train, validation, &full)?,
        })
    }

    pub fn train_regression(
        train: &Dataset,
        validation: &Dataset,
        hidden: usize,
        member_train: &TrainConfig,
        ae_hidden: usize,
        ae_train: &TrainConfig,
    ) -> Result<Self> {
        let full = EnsembleConfig::regression(train.n_features(), hidden, member_train.clone());
        Ok(Baseline {
            imputer: ImputerModel::fit(train, ae_hidden, ae_train)?.0,
            full_model: EnsembleModel::train(train, validation, &full)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamConfig {
    pub missing: MissingnessSpec,
    pub tolerance: Tolerance,
    pub ga: GaConfig,
}

impl StreamConfig {
    pub fn new(missing: MissingnessSpec) -> Self {
        StreamConfig {
            missing,
            tolerance: Tolerance::default(),
            ga: GaConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Outcome {
    Label(String),
    Values(Vec<f64>),
    Unanswerable,
}

/// One streamed instance as seen by one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub missing: Vec<usize>,
    pub outcome: Outcome,
    /// Members that took part (ensemble) or GA evaluations (baseline).
    pub work: usize,
    pub latency_us: f64,
}

pub const ENSEMBLE: &str = "ensemble";
pub const NN_GA: &str = "nn_ga";

/// Replay `test` (after injecting missingness) through the ensemble and,
/// when given, through the impute-then-predict baseline, one method per
/// sequential pass.
pub fn stream_eval(
    ensemble: &EnsembleModel,
    baseline: Option<&Baseline>,
    test: &Dataset,
    config: &StreamConfig,
) -> Result<RunReport> {
    if test.task != ensemble.task {
        return Err(Error::invalid("test data task does not match the ensemble"));
    }
    if test.instances.iter().any(|i| i.target.is_none()) {
        return Err(Error::invalid("every test row needs a target"));
    }
    let stream = inject_missing(test, &config.missing)?;

    let mut methods = vec![replay(ENSEMBLE, &stream, config, |inst| ensemble_answer(ensemble, inst))?];
    if let Some(b) = baseline {
        let mut ga = config.ga.clone();
        methods.push(replay(NN_GA, &stream, config, |inst| {
            // the GA is reseeded per instance so replays do not depend on order
            ga.seed = config.ga.seed.wrapping_add(inst.0 as u64);
            baseline_answer(b, inst.1, &ga)
        })?);
    }

    Ok(RunReport {
        task: ensemble.task,
        missing: config.missing.clone(),
        tolerance: config.tolerance,
        ga: config.ga.clone(),
        instances: stream.len(),
        n_features: ensemble.n_features,
        n_avail: ensemble.config.n_avail,
        members: ensemble.member_count(),
        committee_size: ensemble.committee_size,
        committee_curve: ensemble.committee_curve.clone(),
        notes: vec![
            "nn_ga: autoencoder + GA imputation, then one full-feature model of the ensemble's member family".into(),
            "tolerance_accuracy counts predictions within tolerance (larger is better)".into(),
        ],
        methods,
        generator: None,
    })
}

fn ensemble_answer(model: &EnsembleModel, (_, inst): (usize, &Instance)) -> Result<(Outcome, usize)> {
    let answer = match model.task {
        Task::Classification => model
            .classify(inst)
            .map(|(l, d)| (Outcome::Label(model.class_labels[l].clone()), d.committee_size)),
        Task::Regression => model.regress(inst).map(|(v, d)| (Outcome::Values(v), d.usable)),
    };
    match answer {
        Err(Error::NoUsableMember) => Ok((Outcome::Unanswerable, 0)),
        other => other,
    }
}

fn baseline_answer(b: &Baseline, inst: &Instance, ga: &GaConfig) -> Result<(Outcome, usize)> {
    let imputed = b.imputer.impute(inst, ga)?;
    let (outcome, _) = ensemble_answer(&b.full_model, (0, &imputed.instance))?;
    Ok((outcome, imputed.ga_evaluations))
}

fn replay<F>(name: &str, stream: &Dataset, config: &StreamConfig, mut answer: F) -> Result<MethodReport>
where
    F: FnMut((usize, &Instance)) -> Result<(Outcome, usize)>,
{
    let mut log = Vec::with_capacity(stream.len());
    for (index, inst) in stream.instances.iter().enumerate() {
        let start = Instant::now();
        let (outcome, work) = answer((index, inst))?;
        let latency_us = start.elapsed().as_secs_f64() * 1e6;
        log.push(InstanceRecord {
            index,
            missing: inst.missing_indices(),
            outcome,
            work,
            latency_us,
        });
    }
    summarize(name, stream, &log, config.tolerance)
}

/// Aggregate a per-instance log into method metrics.
pub fn summarize(name: &str, stream: &Dataset, log: &[InstanceRecord], tol: Tolerance) -> Result<MethodReport> {
    let unanswerable = log.iter().filter(|r| r.outcome == Outcome::Unanswerable).count();
    let (score, per_output) = match stream.task {
        Task::Classification => {
            let correct = log
                .iter()
                .filter(|r| match (&r.outcome, &stream.instances[r.index].target) {
                    (Outcome::Label(p), Some(Target::Class(t))) => p == t,
                    _ => false,
                })
                .count();
            (correct as f64 / log.len().max(1) as f64 * 100.0, Vec::new())
        }
        Task::Regression => {
            let outputs = stream.target_names.len();
            let mut per_output = Vec::with_capacity(outputs);
            let mut all_pred = Vec::new();
            let mut all_true = Vec::new();
            for k in 0..outputs {
                let mut preds = Vec::with_capacity(log.len());
                let mut truths = Vec::with_capacity(log.len());
                for r in log {
                    let truth = stream.instances[r.index]
                        .target
                        .as_ref()
                        .and_then(Target::as_values)
                        .ok_or_else(|| Error::invalid("regression row without targets"))?[k];
                    // unanswerable rows count as misses
                    let pred = match &r.outcome {
                        Outcome::Values(v) => v[k],
                        _ => f64::NAN,
                    };
                    preds.push(pred);
                    truths.push(truth);
                }
                per_output.push(tolerance_accuracy(&preds, &truths, tol)?);
                all_pred.extend(preds);
                all_true.extend(truths);
            }
            (tolerance_accuracy(&all_pred, &all_true, tol)?, per_output)
        }
    };
    Ok(MethodReport {
        method: name.to_string(),
        score,
        per_output,
        unanswerable,
        latency: LatencyStats::from_samples(log.iter().map(|r| r.latency_us)),
        log: log.to_vec(),
    })
}
