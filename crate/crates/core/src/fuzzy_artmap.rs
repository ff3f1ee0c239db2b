//! Simplified Fuzzy ARTMAP: complement-coded inputs, category choice, vigilance
//! test with match tracking, and fast learning. Each category node maps
//! directly to one class label, so no ART-b module is needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyArtmapConfig {
    /// Vigilance ρ in [0, 1]. Larger values give smaller hyperboxes.
    pub vigilance: f64,
    /// Learning rate β in [0, 1]; 1 is fast learning.
    pub learning_rate: f64,
    /// Choice parameter α (> 0).
    pub choice: f64,
    pub max_epochs: usize,
    pub match_tracking_epsilon: f64,
}

impl Default for FuzzyArtmapConfig {
    fn default() -> Self {
        FuzzyArtmapConfig {
            vigilance: 0.75,
            learning_rate: 1.0,
            choice: 0.01,
            max_epochs: 50,
            match_tracking_epsilon: 0.001,
        }
    }
}

impl FuzzyArtmapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.vigilance) {
            return Err(Error::invalid(format!("vigilance {} outside [0, 1]", self.vigilance)));
        }
        if !(0.0..=1.0).contains(&self.learning_rate) {
            return Err(Error::invalid(format!(
                "learning rate {} outside [0, 1]",
                self.learning_rate
            )));
        }
        if !(self.choice > 0.0) {
            return Err(Error::invalid("choice parameter must be positive"));
        }
        if !(self.match_tracking_epsilon > 0.0) {
            return Err(Error::invalid("match tracking epsilon must be positive"));
        }
        if self.max_epochs == 0 {
            return Err(Error::invalid("max_epochs must be at least 1"));
        }
        Ok(())
    }
}

/// A committed category: a hyperbox in complement-coded form plus its label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryNode {
    pub weight: Vec<f64>,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyArtmapModel {
    pub config: FuzzyArtmapConfig,
    pub input_dim: usize,
    pub nodes: Vec<CategoryNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainStats {
    pub epochs: usize,
    /// True when the last epoch changed nothing.
    pub converged: bool,
}

/// `(x, 1 - x)`. Every component of `x` must lie in [0, 1].
pub fn complement_code(x: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::invalid(format!("input component {bad} outside [0, 1]")));
    }
    let mut coded = Vec::with_capacity(2 * x.len());
    coded.extend_from_slice(x);
    coded.extend(x.iter().map(|v| 1.0 - v));
    Ok(coded)
}

fn l1(v: &[f64]) -> f64 {
    v.iter().sum()
}

/// |a ∧ b|: L1 norm of the componentwise minimum.
fn fuzzy_and_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

impl FuzzyArtmapModel {
    pub fn new(config: FuzzyArtmapConfig, input_dim: usize) -> Result<Self> {
        config.validate()?;
        if input_dim == 0 {
            return Err(Error::invalid("input dimension must be positive"));
        }
        Ok(FuzzyArtmapModel {
            config,
            input_dim,
            nodes: Vec::new(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn code_checked(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::invalid(format!(
                "input has {} components, model expects {}",
                x.len(),
                self.input_dim
            )));
        }
        complement_code(x)
    }

    /// Choice value T_j = |I ∧ w_j| / (α + |w_j|) and match |I ∧ w_j| per node.
    fn choices(&self, coded: &[f64]) -> Vec<(f64, f64)> {
        self.nodes
            .iter()
            .map(|node| {
                let overlap = fuzzy_and_norm(coded, &node.weight);
                (overlap / (self.config.choice + l1(&node.weight)), overlap)
            })
            .collect()
    }

    /// Node indices by descending choice value, ties by creation order.
    fn search_order(choices: &[(f64, f64)]) -> Vec<usize> {
        let mut order: Vec<usize> = (0..choices.len()).collect();
        order.sort_by(|&a, &b| choices[b].0.total_cmp(&choices[a].0).then(a.cmp(&b)));
        order
    }

    /// Present one complement-coded input. Returns whether the model changed.
    fn present(&mut self, coded: &[f64], label: usize) -> bool {
        let input_norm = l1(coded);
        let choices = self.choices(coded);
        let mut vigilance = self.config.vigilance;
        for j in Self::search_order(&choices) {
            let match_ratio = choices[j].1 / input_norm;
            if match_ratio < vigilance {
                continue;
            }
            if self.nodes[j].label != label {
                // match tracking
                vigilance = match_ratio + self.config.match_tracking_epsilon;
                continue;
            }
            let beta = self.config.learning_rate;
            let mut changed = false;
            for (w, &i) in self.nodes[j].weight.iter_mut().zip(coded) {
                // Written as a shrink step so rounding can never push a weight up.
                let updated = *w - beta * (*w - i.min(*w));
                if updated != *w {
                    *w = updated;
                    changed = true;
                }
            }
            return changed;
        }
        // An identical node already exists when contradictory labels share one
        // input; committing it again would never win a prediction.
        if self
            .nodes
            .iter()
            .any(|n| n.label == label && n.weight.as_slice() == coded)
        {
            return false;
        }
        self.nodes.push(CategoryNode {
            weight: coded.to_vec(),
            label,
        });
        true
    }

    /// Train on `(input, label)` pairs in order, repeating epochs until an
    /// epoch changes nothing or `max_epochs` is reached.
    pub fn train(&mut self, inputs: &[(Vec<f64>, usize)]) -> Result<TrainStats> {
        if inputs.is_empty() {
            return Err(Error::invalid("no training inputs"));
        }
        let coded: Vec<(Vec<f64>, usize)> = inputs
            .iter()
            .map(|(x, label)| Ok((self.code_checked(x)?, *label)))
            .collect::<Result<_>>()?;
        for epoch in 1..=self.config.max_epochs {
            let mut changed = false;
            for (input, label) in &coded {
                changed |= self.present(input, *label);
            }
            if !changed {
                return Ok(TrainStats {
                    epochs: epoch,
                    converged: true,
                });
            }
        }
        Ok(TrainStats {
            epochs: self.config.max_epochs,
            converged: false,
        })
    }

    /// Label of the node with the largest choice value (no vigilance test).
    pub fn classify(&self, x: &[f64]) -> Result<usize> {
        if self.nodes.is_empty() {
            return Err(Error::ModelNotTrained);
        }
        let coded = self.code_checked(x)?;
        let choices = self.choices(&coded);
        let mut best = 0;
        for j in 1..choices.len() {
            if choices[j].0 > choices[best].0 {
                best = j;
            }
        }
        Ok(self.nodes[best].label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fresh(config: FuzzyArtmapConfig, d: usize) -> FuzzyArtmapModel {
        FuzzyArtmapModel::new(config, d).unwrap()
    }

    #[test]
    fn complement_coding() {
        let c = complement_code(&[0.2, 0.7]).unwrap();
        assert!((c[0] - 0.2).abs() < 1e-15 && (c[1] - 0.7).abs() < 1e-15);
        assert!((c[2] - 0.8).abs() < 1e-15 && (c[3] - 0.3).abs() < 1e-15);
        assert_eq!(complement_code(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0, 1.0, 1.0]);
        assert!(complement_code(&[1.2]).is_err());
        assert!(complement_code(&[-0.1]).is_err());
    }

    #[test]
    fn first_commit_copies_input() {
        let mut m = fresh(FuzzyArtmapConfig::default(), 1);
        m.train(&[(vec![0.5], 0)]).unwrap();
        assert_eq!(m.nodes, vec![CategoryNode { weight: vec![0.5, 0.5], label: 0 }]);
    }

    #[test]
    fn contradictory_labels_make_two_nodes() {
        let mut m = fresh(FuzzyArtmapConfig::default(), 1);
        let stats = m.train(&[(vec![0.3], 0), (vec![0.3], 1)]).unwrap();
        assert!(stats.converged);
        assert_eq!(m.node_count(), 2);
        assert_eq!(m.nodes[1].label, 1);
        assert_eq!(m.classify(&[0.3]).unwrap(), 0);
    }

    #[test]
    fn xor_recall() {
        let data = vec![
            (vec![0.0, 0.0], 0),
            (vec![1.0, 1.0], 0),
            (vec![0.0, 1.0], 1),
            (vec![1.0, 0.0], 1),
        ];
        let mut m = fresh(FuzzyArtmapConfig::default(), 2);
        let stats = m.train(&data).unwrap();
        assert!(stats.converged);
        for (x, y) in &data {
            assert_eq!(m.classify(x).unwrap(), *y);
        }
    }

    #[test]
    fn single_node_always_wins() {
        let mut m = fresh(FuzzyArtmapConfig::default(), 2);
        m.train(&[(vec![0.1, 0.9], 4)]).unwrap();
        for x in [[0.0, 0.0], [1.0, 1.0], [0.5, 0.2]] {
            assert_eq!(m.classify(&x).unwrap(), 4);
        }
    }

    #[test]
    fn committing_input_wins_between_disjoint_boxes() {
        // Two boxes: [0.0,0.2]^2 (label 0) and [0.7,0.9]^2 (label 1).
        let mut m = fresh(FuzzyArtmapConfig::default(), 2);
        m.nodes = vec![
            CategoryNode { weight: vec![0.0, 0.0, 0.8, 0.8], label: 0 },
            CategoryNode { weight: vec![0.7, 0.7, 0.1, 0.1], label: 1 },
        ];
        let mut committed = fresh(FuzzyArtmapConfig::default(), 2);
        committed.nodes = m.nodes.clone();
        committed.nodes.push(CategoryNode { weight: vec![0.75, 0.8, 0.25, 0.2], label: 2 });
        // A point committed as its own node: choice d/(0.01+d) beats both boxes.
        assert_eq!(committed.classify(&[0.75, 0.8]).unwrap(), 2);
        assert_eq!(m.classify(&[0.1, 0.1]).unwrap(), 0);
        assert_eq!(m.classify(&[0.8, 0.8]).unwrap(), 1);
    }

    #[test]
    fn untrained_and_dimension_errors() {
        let m = fresh(FuzzyArtmapConfig::default(), 2);
        assert!(matches!(m.classify(&[0.1, 0.1]), Err(Error::ModelNotTrained)));
        let mut m = fresh(FuzzyArtmapConfig::default(), 2);
        assert!(matches!(m.train(&[(vec![0.1], 0)]), Err(Error::InvalidInput(_))));
        assert!(m.train(&[]).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = FuzzyArtmapConfig { vigilance: 1.5, ..Default::default() };
        assert!(FuzzyArtmapModel::new(bad, 2).is_err());
        let bad = FuzzyArtmapConfig { choice: 0.0, ..Default::default() };
        assert!(FuzzyArtmapModel::new(bad, 2).is_err());
        let bad = FuzzyArtmapConfig { match_tracking_epsilon: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn slow_learning_moves_partway() {
        let config = FuzzyArtmapConfig { learning_rate: 0.5, vigilance: 0.0, ..Default::default() };
        let mut m = fresh(config, 1);
        m.present(&complement_code(&[0.4]).unwrap(), 0);
        m.present(&complement_code(&[0.8]).unwrap(), 0);
        // w = 0.5 * min(I, w) + 0.5 * w with I = [0.8, 0.2], w = [0.4, 0.6]
        assert_eq!(m.nodes.len(), 1);
        assert!((m.nodes[0].weight[0] - 0.4).abs() < 1e-15);
        assert!((m.nodes[0].weight[1] - 0.4).abs() < 1e-15);
    }
}
