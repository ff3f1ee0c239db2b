//! Feature-subset ensemble.
//!
//! One member is trained for every combination of `n_avail` features on
//! complete data. Each member's validation error `E_i` gives it the weight
//! `α_i = (1 - E_i) / Σ_j (1 - E_j)`. At prediction time only members whose
//! features are all present are used:
//!
//! * classification: the top members by `α` form an odd-sized committee,
//!   seeded by the elite member, whose size `K*` was fixed on the validation
//!   set; the label with the largest summed `α` wins.
//! * regression: all usable members vote, with their `α` renormalized to sum
//!   to one over the usable set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{count_networks, enumerate_subsets};
use crate::data::{split_permutation, Dataset, FeatureScaler, FeatureSubset, Instance, Target, Task};
use crate::error::{Error, Result};
use crate::fuzzy_artmap::{FuzzyArtmapConfig, FuzzyArtmapModel};
use crate::harness::metrics::{tolerance_accuracy, Tolerance};
use crate::mlp::{MlpNetwork, TrainConfig};

pub const DEFAULT_MEMBER_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MemberConfig {
    Artmap(FuzzyArtmapConfig),
    Mlp { hidden_dim: usize, train: TrainConfig },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_avail: usize,
    pub member: MemberConfig,
    pub member_cap: u64,
    /// Seeds each member's presentation order (ARTMAP members).
    pub seed: u64,
    /// Scoring rule for regression members' validation error.
    pub tolerance: Tolerance,
}

impl EnsembleConfig {
    pub fn classification(n_avail: usize, artmap: FuzzyArtmapConfig) -> Self {
        EnsembleConfig {
            n_avail,
            member: MemberConfig::Artmap(artmap),
            member_cap: DEFAULT_MEMBER_CAP,
            seed: 0,
            tolerance: Tolerance::default(),
        }
    }

    pub fn regression(n_avail: usize, hidden_dim: usize, train: TrainConfig) -> Self {
        EnsembleConfig {
            n_avail,
            seed: train.seed,
            member: MemberConfig::Mlp { hidden_dim, train },
            member_cap: DEFAULT_MEMBER_CAP,
            tolerance: Tolerance::default(),
        }
    }

    pub fn task(&self) -> Task {
        match self.member {
            MemberConfig::Artmap(_) => Task::Classification,
            MemberConfig::Mlp { .. } => Task::Regression,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MemberModel {
    Artmap(FuzzyArtmapModel),
    Mlp(MlpNetwork),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub subset: FeatureSubset,
    pub model: MemberModel,
    /// α_i
    pub weight: f64,
    /// E_i in [0, 1].
    pub validation_error: f64,
}

/// Member output on one instance.
#[derive(Debug, Clone, PartialEq)]
pub enum MemberOutput {
    Label(usize),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub config: EnsembleConfig,
    pub task: Task,
    pub n_features: usize,
    pub feature_names: Vec<String>,
    pub class_labels: Vec<String>,
    pub target_names: Vec<String>,
    pub members: Vec<EnsembleMember>,
    pub scaler: FeatureScaler,
    /// Regression only: scaling of target columns.
    pub target_scaler: Option<FeatureScaler>,
    /// Classification only: validated committee size K*.
    pub committee_size: Option<usize>,
    /// Classification only: validation accuracy (%) per odd committee size.
    pub committee_curve: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteDiagnostics {
    pub usable: usize,
    pub committee_size: usize,
    /// Summed α per label index, in order of first vote.
    pub votes: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionDiagnostics {
    pub usable: usize,
    /// (member index, renormalized weight)
    pub weights: Vec<(usize, f64)>,
}

/// Weights from validation errors: `α_i = (1 - E_i) / Σ (1 - E_j)`, uniform
/// when every member is always wrong.
pub fn validation_weights(errors: &[f64]) -> Vec<f64> {
    let total: f64 = errors.iter().map(|e| 1.0 - e).sum();
    if total <= 0.0 {
        return vec![1.0 / errors.len() as f64; errors.len()];
    }
    errors.iter().map(|e| (1.0 - e) / total).collect()
}

/// Summed-weight vote; ties go to the label whose first voter came first.
/// `voters` must be ordered by descending weight.
fn weighted_vote(voters: impl Iterator<Item = (usize, f64)>) -> Vec<(usize, f64)> {
    let mut mass: Vec<(usize, f64)> = Vec::new();
    for (label, weight) in voters {
        match mass.iter_mut().find(|(l, _)| *l == label) {
            Some((_, m)) => *m += weight,
            None => mass.push((label, weight)),
        }
    }
    mass
}

fn vote_winner(mass: &[(usize, f64)]) -> usize {
    let mut best = 0;
    for i in 1..mass.len() {
        if mass[i].1 > mass[best].1 {
            best = i;
        }
    }
    mass[best].0
}

fn largest_odd_at_most(k: usize) -> usize {
    if k % 2 == 0 {
        k.saturating_sub(1)
    } else {
        k
    }
}

struct TrainingView {
    inputs: Vec<Vec<f64>>,
    labels: Vec<Option<usize>>,
    targets: Vec<Vec<f64>>,
}

impl EnsembleModel {
    /// Train every member on complete `train` data and weight it on complete
    /// `validation` data.
    pub fn train(train: &Dataset, validation: &Dataset, config: &EnsembleConfig) -> Result<Self> {
        let task = config.task();
        if train.task != task || validation.task != task {
            return Err(Error::invalid(format!("member family needs a {task:?} dataset")));
        }
        if train.is_empty() || validation.is_empty() {
            return Err(Error::invalid("training and validation sets must be non-empty"));
        }
        if !train.is_complete() || !validation.is_complete() {
            return Err(Error::invalid("ensemble training requires complete data"));
        }
        if train.instances.iter().chain(&validation.instances).any(|i| i.target.is_none()) {
            return Err(Error::invalid("every training and validation row needs a target"));
        }
        let n = train.n_features();
        if validation.n_features() != n {
            return Err(Error::invalid("training and validation feature counts differ"));
        }
        let count = count_networks(n, config.n_avail)?;
        if count > config.member_cap {
            return Err(Error::invalid(format!(
                "C({n}, {}) = {count} members exceeds the cap of {}",
                config.n_avail, config.member_cap
            )));
        }

        let scaler = FeatureScaler::fit(train)?;
        let target_scaler = match task {
            Task::Regression => Some(FeatureScaler::fit_targets(train)?),
            Task::Classification => None,
        };
        let class_labels = train.class_labels.clone();
        let view = |data: &Dataset| -> TrainingView {
            let inputs = data
                .instances
                .iter()
                .map(|i| scaler.scale_all(i.complete_values()))
                .collect();
            let labels = data
                .instances
                .iter()
                .map(|i| {
                    i.target
                        .as_ref()
                        .and_then(Target::as_class)
                        .and_then(|l| class_labels.iter().position(|c| c == l))
                })
                .collect();
            let targets = match &target_scaler {
                Some(ts) => data
                    .instances
                    .iter()
                    .map(|i| ts.scale_all(i.target.as_ref().and_then(Target::as_values).unwrap()))
                    .collect(),
                None => Vec::new(),
            };
            TrainingView { inputs, labels, targets }
        };
        let train_view = view(train);
        let valid_view = view(validation);

        let subsets = enumerate_subsets(n, config.n_avail)?;
        let trained: Vec<(MemberModel, Vec<MemberOutput>)> = subsets
            .par_iter()
            .enumerate()
            .map(|(index, subset)| {
                train_member(subset, index, &train_view, &valid_view, config).map_err(|e| {
                    Error::MemberTraining {
                        subset: subset.indices().to_vec(),
                        source: Box::new(e),
                    }
                })
            })
            .collect::<Result<_>>()?;

        let mut model = EnsembleModel {
            config: config.clone(),
            task,
            n_features: n,
            feature_names: train.feature_names.clone(),
            class_labels,
            target_names: train.target_names.clone(),
            members: Vec::with_capacity(subsets.len()),
            scaler,
            target_scaler,
            committee_size: None,
            committee_curve: Vec::new(),
        };

        let mut outputs = Vec::with_capacity(subsets.len());
        let mut errors = Vec::with_capacity(subsets.len());
        for (subset, (member_model, member_outputs)) in subsets.into_iter().zip(trained) {
            errors.push(model.validation_error(&member_outputs, validation, &valid_view)?);
            outputs.push(member_outputs);
            model.members.push(EnsembleMember {
                subset,
                model: member_model,
                weight: 0.0,
                validation_error: 0.0,
            });
        }
        for ((member, w), e) in model.members.iter_mut().zip(validation_weights(&errors)).zip(&errors) {
            member.weight = w;
            member.validation_error = *e;
        }

        if task == Task::Classification {
            model.committee_curve = model.committee_curve_from(&outputs, &valid_view.labels);
            model.committee_size = Some(select_committee_size(&model.committee_curve));
        }
        Ok(model)
    }

    fn validation_error(&self, outputs: &[MemberOutput], validation: &Dataset, view: &TrainingView) -> Result<f64> {
        match self.task {
            Task::Classification => {
                let wrong = outputs
                    .iter()
                    .zip(&view.labels)
                    .filter(|(o, truth)| match (o, truth) {
                        (MemberOutput::Label(p), Some(t)) => p != t,
                        _ => true,
                    })
                    .count();
                Ok(wrong as f64 / outputs.len() as f64)
            }
            Task::Regression => {
                let ts = self.target_scaler.as_ref().expect("regression has a target scaler");
                let mut preds = Vec::new();
                let mut truths = Vec::new();
                for (o, inst) in outputs.iter().zip(&validation.instances) {
                    if let MemberOutput::Values(v) = o {
                        preds.extend(ts.unscale_all(v));
                        truths.extend_from_slice(inst.target.as_ref().and_then(Target::as_values).unwrap());
                    }
                }
                let acc = tolerance_accuracy(&preds, &truths, self.config.tolerance)?;
                Ok(1.0 - acc / 100.0)
            }
        }
    }

    /// Member indices by descending α, ties by index.
    pub fn rank_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by(|&a, &b| {
            self.members[b]
                .weight
                .total_cmp(&self.members[a].weight)
                .then(a.cmp(&b))
        });
        order
    }

    fn committee_curve_from(&self, outputs: &[Vec<MemberOutput>], truths: &[Option<usize>]) -> Vec<(usize, f64)> {
        let order = self.rank_order();
        let mut curve = Vec::new();
        let mut size = 1;
        while size <= order.len() {
            let correct = (0..truths.len())
                .filter(|&row| {
                    let mass = weighted_vote(order[..size].iter().map(|&m| match &outputs[m][row] {
                        MemberOutput::Label(l) => (*l, self.members[m].weight),
                        MemberOutput::Values(_) => unreachable!("classification member"),
                    }));
                    Some(vote_winner(&mass)) == truths[row]
                })
                .count();
            curve.push((size, correct as f64 / truths.len() as f64 * 100.0));
            size += 2;
        }
        curve
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    /// Members whose features are all present, by descending α.
    pub fn usable_members(&self, instance: &Instance) -> Vec<usize> {
        self.rank_order()
            .into_iter()
            .filter(|&m| self.members[m].subset.is_available(instance.mask()))
            .collect()
    }

    /// Output of member `m`, in model units (targets are unscaled).
    pub fn member_output(&self, m: usize, instance: &Instance) -> Result<MemberOutput> {
        let member = &self.members[m];
        let x = self.scaler.project(instance, &member.subset)?;
        match &member.model {
            MemberModel::Artmap(net) => Ok(MemberOutput::Label(net.classify(&x)?)),
            MemberModel::Mlp(net) => {
                let ts = self.target_scaler.as_ref().ok_or(Error::ModelNotTrained)?;
                Ok(MemberOutput::Values(ts.unscale_all(&net.forward(&x)?)))
            }
        }
    }

    /// Weighted-majority label index of the validated committee.
    pub fn classify(&self, instance: &Instance) -> Result<(usize, VoteDiagnostics)> {
        let k_star = match (self.task, self.committee_size) {
            (Task::Classification, Some(k)) => k,
            (Task::Classification, None) => return Err(Error::ModelNotTrained),
            _ => return Err(Error::invalid("classify called on a regression ensemble")),
        };
        self.check_width(instance)?;
        let usable = self.usable_members(instance);
        if usable.is_empty() {
            return Err(Error::NoUsableMember);
        }
        let size = largest_odd_at_most(k_star.min(usable.len())).max(1);
        let mut voters = Vec::with_capacity(size);
        for &m in &usable[..size] {
            match self.member_output(m, instance)? {
                MemberOutput::Label(l) => voters.push((l, self.members[m].weight)),
                MemberOutput::Values(_) => unreachable!("classification member"),
            }
        }
        let votes = weighted_vote(voters.into_iter());
        Ok((
            vote_winner(&votes),
            VoteDiagnostics {
                usable: usable.len(),
                committee_size: size,
                votes,
            },
        ))
    }

    pub fn classify_label(&self, instance: &Instance) -> Result<&str> {
        let (label, _) = self.classify(instance)?;
        Ok(&self.class_labels[label])
    }

    /// Renormalized weighted average over every usable member.
    pub fn regress(&self, instance: &Instance) -> Result<(Vec<f64>, RegressionDiagnostics)> {
        if self.task != Task::Regression {
            return Err(Error::invalid("regress called on a classification ensemble"));
        }
        self.check_width(instance)?;
        let usable = self.usable_members(instance);
        if usable.is_empty() {
            return Err(Error::NoUsableMember);
        }
        let total: f64 = usable.iter().map(|&m| self.members[m].weight).sum();
        let weights: Vec<(usize, f64)> = if total > 0.0 {
            usable.iter().map(|&m| (m, self.members[m].weight / total)).collect()
        } else {
            usable.iter().map(|&m| (m, 1.0 / usable.len() as f64)).collect()
        };
        let mut out = vec![0.0; self.target_names.len()];
        for &(m, w) in &weights {
            match self.member_output(m, instance)? {
                MemberOutput::Values(v) => {
                    for (o, x) in out.iter_mut().zip(v) {
                        *o += w * x;
                    }
                }
                MemberOutput::Label(_) => unreachable!("regression member"),
            }
        }
        Ok((
            out,
            RegressionDiagnostics {
                usable: usable.len(),
                weights,
            },
        ))
    }

    fn check_width(&self, instance: &Instance) -> Result<()> {
        if instance.len() != self.n_features {
            return Err(Error::invalid(format!(
                "instance has {} features, ensemble expects {}",
                instance.len(),
                self.n_features
            )));
        }
        Ok(())
    }
}

/// Smallest odd committee size after which accuracy stops improving.
pub fn select_committee_size(curve: &[(usize, f64)]) -> usize {
    for pair in curve.windows(2) {
        if pair[1].1 <= pair[0].1 {
            return pair[0].0;
        }
    }
    curve.last().map(|&(k, _)| k).unwrap_or(1)
}

fn train_member(
    subset: &FeatureSubset,
    index: usize,
    train: &TrainingView,
    validation: &TrainingView,
    config: &EnsembleConfig,
) -> Result<(MemberModel, Vec<MemberOutput>)> {
    let pick = |x: &[f64]| -> Vec<f64> { subset.indices().iter().map(|&i| x[i]).collect() };
    match &config.member {
        MemberConfig::Artmap(cfg) => {
            let mut net = FuzzyArtmapModel::new(cfg.clone(), subset.len())?;
            // members see the training set in different orders
            let order = split_permutation(train.inputs.len(), config.seed.wrapping_add(index as u64));
            let pairs: Vec<(Vec<f64>, usize)> = order
                .into_iter()
                .map(|r| {
                    let label = train.labels[r].expect("training labels come from the training vocabulary");
                    (pick(&train.inputs[r]), label)
                })
                .collect();
            net.train(&pairs)?;
            let outputs = validation
                .inputs
                .iter()
                .map(|x| net.classify(&pick(x)).map(MemberOutput::Label))
                .collect::<Result<_>>()?;
            Ok((MemberModel::Artmap(net), outputs))
        }
        MemberConfig::Mlp { hidden_dim, train: tc } => {
            let outputs_dim = train.targets[0].len();
            let seed = tc.seed.wrapping_add(index as u64);
            let mut net = MlpNetwork::init(subset.len(), *hidden_dim, outputs_dim, seed)?;
            let xs: Vec<Vec<f64>> = train.inputs.iter().map(|x| pick(x)).collect();
            net.train_scg(&xs, &train.targets, tc)?;
            let outputs = validation
                .inputs
                .iter()
                .map(|x| net.forward(&pick(x)).map(MemberOutput::Values))
                .collect::<Result<_>>()?;
            Ok((MemberModel::Mlp(net), outputs))
        }
    }
}
