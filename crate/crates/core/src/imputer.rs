//! Autoencoder + genetic algorithm imputation.
//!
//! An autoencoder is trained on complete data. For an instance with gaps, the
//! GA searches the missing entries (in scaled [0, 1] space) for the values
//! that make the assembled vector reconstruct itself best, i.e. that minimize
//! `Σ (x - f(x))²` over all components.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureScaler, Instance};
use crate::error::{Error, Result};
use crate::ga::{self, GaConfig};
use crate::mlp::{MlpNetwork, TrainConfig, TrainTrace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputerModel {
    pub scaler: FeatureScaler,
    pub autoencoder: Option<MlpNetwork>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Imputation {
    /// Copy of the input with every feature present.
    pub instance: Instance,
    /// Objective at the returned point (0 when nothing was missing).
    pub objective: f64,
    pub missing: Vec<usize>,
    /// Set when the instance had no missing features and was returned as is.
    pub unchanged: bool,
    pub ga_evaluations: usize,
}

impl ImputerModel {
    pub fn untrained(scaler: FeatureScaler) -> Self {
        ImputerModel {
            scaler,
            autoencoder: None,
        }
    }

    /// Fit the scaler and a `n - hidden_dim - n` autoencoder on complete data.
    pub fn fit(data: &Dataset, hidden_dim: usize, config: &TrainConfig) -> Result<(Self, TrainTrace)> {
        if data.is_empty() || !data.is_complete() {
            return Err(Error::invalid("the autoencoder needs complete, non-empty data"));
        }
        let scaler = FeatureScaler::fit(data)?;
        let xs: Vec<Vec<f64>> = data
            .instances
            .iter()
            .map(|i| scaler.scale_all(i.complete_values()))
            .collect();
        let mut net = MlpNetwork::autoencoder(data.n_features(), hidden_dim, config.seed)?;
        let trace = net.train_scg(&xs, &xs, config)?;
        Ok((
            ImputerModel {
                scaler,
                autoencoder: Some(net),
            },
            trace,
        ))
    }

    fn network(&self) -> Result<&MlpNetwork> {
        self.autoencoder.as_ref().ok_or(Error::ModelNotTrained)
    }

    fn check(&self, instance: &Instance) -> Result<&MlpNetwork> {
        let net = self.network()?;
        if instance.len() != net.input_dim {
            return Err(Error::invalid(format!(
                "instance has {} features, autoencoder expects {}",
                instance.len(),
                net.input_dim
            )));
        }
        Ok(net)
    }

    /// Scaled vector with known entries filled in and missing ones zeroed.
    fn scaled_known(&self, instance: &Instance) -> Vec<f64> {
        (0..instance.len())
            .map(|i| instance.value(i).map_or(0.0, |v| self.scaler.scale(i, v)))
            .collect()
    }

    /// Reconstruction error of the vector assembled from the instance's known
    /// values and `candidate` (scaled) in its missing slots, in index order.
    pub fn objective(&self, instance: &Instance, candidate: &[f64]) -> Result<f64> {
        let net = self.check(instance)?;
        let missing = instance.missing_indices();
        if candidate.len() != missing.len() {
            return Err(Error::invalid(format!(
                "{} candidate values for {} missing slots",
                candidate.len(),
                missing.len()
            )));
        }
        let mut x = self.scaled_known(instance);
        Ok(reconstruction_error(net, &mut x, &missing, candidate))
    }

    /// Fill the missing features of `instance` with the GA's best candidate.
    pub fn impute(&self, instance: &Instance, ga_config: &GaConfig) -> Result<Imputation> {
        let net = self.check(instance)?;
        let missing = instance.missing_indices();
        if missing.is_empty() {
            return Ok(Imputation {
                instance: instance.clone(),
                objective: 0.0,
                missing,
                unchanged: true,
                ga_evaluations: 0,
            });
        }
        let base = self.scaled_known(instance);
        let scratch = std::cell::RefCell::new(base);
        let outcome = ga::minimize(
            |genes| reconstruction_error(net, &mut scratch.borrow_mut(), &missing, genes),
            &vec![(0.0, 1.0); missing.len()],
            ga_config,
        )?;
        let mut completed = instance.clone();
        for (&i, &g) in missing.iter().zip(&outcome.best_genes) {
            completed.set_value(i, self.scaler.unscale(i, g));
        }
        Ok(Imputation {
            instance: completed,
            objective: outcome.best_value,
            missing,
            unchanged: false,
            ga_evaluations: outcome.evaluations,
        })
    }
}

fn reconstruction_error(net: &MlpNetwork, x: &mut [f64], missing: &[usize], candidate: &[f64]) -> f64 {
    for (&i, &c) in missing.iter().zip(candidate) {
        x[i] = c;
    }
    let y = net.forward(x).expect("width checked by caller");
    x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum()
}
