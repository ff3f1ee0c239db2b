//! JSON persistence. Floats are written in shortest round-trip form and read
//! back bit-exactly.
//!
//! An ensemble is a directory holding `manifest.json` plus one document per
//! member under `members/`. A baseline is a directory with `imputer.json` and
//! the full-feature model as an ensemble directory under `full/`.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::data::{FeatureScaler, FeatureSubset, Task};
use crate::ensemble::{EnsembleConfig, EnsembleMember, EnsembleModel, MemberModel};
use crate::error::{Error, Result};
use crate::harness::stream::Baseline;
use crate::imputer::ImputerModel;

const FORMAT_VERSION: u32 = 1;

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, serde_json::to_vec_pretty(value)?)?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestEntry {
    subset: FeatureSubset,
    weight: f64,
    validation_error: f64,
    file: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    config: EnsembleConfig,
    task: Task,
    n_features: usize,
    feature_names: Vec<String>,
    class_labels: Vec<String>,
    target_names: Vec<String>,
    scaler: FeatureScaler,
    target_scaler: Option<FeatureScaler>,
    committee_size: Option<usize>,
    committee_curve: Vec<(usize, f64)>,
    members: Vec<ManifestEntry>,
}

pub fn save_ensemble(dir: &Path, model: &EnsembleModel) -> Result<()> {
    fs::create_dir_all(dir.join("members"))?;
    let mut entries = Vec::with_capacity(model.members.len());
    for (i, member) in model.members.iter().enumerate() {
        let file = format!("members/member_{i:05}.json");
        save_json(&dir.join(&file), &member.model)?;
        entries.push(ManifestEntry {
            subset: member.subset.clone(),
            weight: member.weight,
            validation_error: member.validation_error,
            file,
        });
    }
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        config: model.config.clone(),
        task: model.task,
        n_features: model.n_features,
        feature_names: model.feature_names.clone(),
        class_labels: model.class_labels.clone(),
        target_names: model.target_names.clone(),
        scaler: model.scaler.clone(),
        target_scaler: model.target_scaler.clone(),
        committee_size: model.committee_size,
        committee_curve: model.committee_curve.clone(),
        members: entries,
    };
    save_json(&dir.join("manifest.json"), &manifest)
}

pub fn load_ensemble(dir: &Path) -> Result<EnsembleModel> {
    let manifest: Manifest = load_json(&dir.join("manifest.json"))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::invalid(format!(
            "unsupported ensemble format version {}",
            manifest.format_version
        )));
    }
    let members = manifest
        .members
        .into_iter()
        .map(|entry| {
            let model: MemberModel = load_json(&dir.join(&entry.file))?;
            Ok(EnsembleMember {
                subset: entry.subset,
                model,
                weight: entry.weight,
                validation_error: entry.validation_error,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EnsembleModel {
        config: manifest.config,
        task: manifest.task,
        n_features: manifest.n_features,
        feature_names: manifest.feature_names,
        class_labels: manifest.class_labels,
        target_names: manifest.target_names,
        members,
        scaler: manifest.scaler,
        target_scaler: manifest.target_scaler,
        committee_size: manifest.committee_size,
        committee_curve: manifest.committee_curve,
    })
}

pub fn save_baseline(dir: &Path, baseline: &Baseline) -> Result<()> {
    save_json(&dir.join("imputer.json"), &baseline.imputer)?;
    save_ensemble(&dir.join("full"), &baseline.full_model)
}

pub fn load_baseline(dir: &Path) -> Result<Baseline> {
    let imputer: ImputerModel = load_json(&dir.join("imputer.json"))?;
    Ok(Baseline {
        imputer,
        full_model: load_ensemble(&dir.join("full"))?,
    })
}
