use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when scoring regression outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative tolerance; a prediction counts when `|p - t| <= rel_tol * |t|`.
    pub rel_tol: f64,
    /// Absolute bound used instead when `|t| < abs_floor`.
    pub abs_floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_tol: 0.2,
            abs_floor: 1e-6,
        }
    }
}

impl Tolerance {
    pub fn within(&self, prediction: f64, truth: f64) -> bool {
        let err = (prediction - truth).abs();
        if truth.abs() < self.abs_floor {
            err <= self.abs_floor
        } else {
            err <= self.rel_tol * truth.abs()
        }
    }
}

/// Percentage of predictions within tolerance of the truth.
///
/// Despite often being called an error rate, larger is better.
pub fn tolerance_accuracy(predictions: &[f64], truths: &[f64], tol: Tolerance) -> Result<f64> {
    if predictions.len() != truths.len() {
        return Err(Error::invalid(format!(
            "{} predictions but {} truths",
            predictions.len(),
            truths.len()
        )));
    }
    if truths.is_empty() {
        return Err(Error::invalid("no predictions to score"));
    }
    let hits = predictions
        .iter()
        .zip(truths)
        .filter(|(p, t)| tol.within(**p, **t))
        .count();
    Ok(hits as f64 / truths.len() as f64 * 100.0)
}

/// Percentage of equal pairs.
pub fn accuracy<T: PartialEq>(predictions: &[T], truths: &[T]) -> Result<f64> {
    if predictions.len() != truths.len() || truths.is_empty() {
        return Err(Error::invalid("accuracy needs equal, non-empty inputs"));
    }
    let hits = predictions.iter().zip(truths).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truths.len() as f64 * 100.0)
}
