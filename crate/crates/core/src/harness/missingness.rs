//! Missingness injection for simulated sensor failures.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MissingMode {
    /// Exactly `count` features, chosen uniformly, go missing in every row.
    Mcar { count: usize },
    /// Each cell goes missing independently with `probability`.
    McarRate { probability: f64 },
    /// `victim` is missing exactly when `driver` reads below `threshold`
    /// (raw units).
    Mar {
        driver: usize,
        threshold: f64,
        victim: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingnessSpec {
    #[serde(flatten)]
    pub mode: MissingMode,
    pub seed: u64,
}

impl MissingnessSpec {
    pub fn none() -> Self {
        Self::mcar(0, 0)
    }

    pub fn mcar(count: usize, seed: u64) -> Self {
        MissingnessSpec {
            mode: MissingMode::Mcar { count },
            seed,
        }
    }
}

/// Copy of `dataset` with cells masked out according to `spec`.
pub fn inject_missing(dataset: &Dataset, spec: &MissingnessSpec) -> Result<Dataset> {
    let n = dataset.n_features();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = dataset.clone();
    match spec.mode {
        MissingMode::Mcar { count } => {
            if count > n {
                return Err(Error::invalid(format!("cannot remove {count} of {n} features")));
            }
            if count > 0 {
                for inst in &mut out.instances {
                    for i in sample(&mut rng, n, count) {
                        inst.set_missing(i);
                    }
                }
            }
        }
        MissingMode::McarRate { probability } => {
            if !(0.0..=1.0).contains(&probability) {
                return Err(Error::invalid(format!("probability {probability} outside [0, 1]")));
            }
            for inst in &mut out.instances {
                for i in 0..n {
                    if rng.random::<f64>() < probability {
                        inst.set_missing(i);
                    }
                }
            }
        }
        MissingMode::Mar {
            driver,
            threshold,
            victim,
        } => {
            if driver == victim {
                return Err(Error::invalid("MAR driver and victim must differ"));
            }
            if driver >= n || victim >= n {
                return Err(Error::invalid("MAR feature index out of range"));
            }
            for inst in &mut out.instances {
                if inst.value(driver).is_some_and(|v| v < threshold) {
                    inst.set_missing(victim);
                }
            }
        }
    }
    Ok(out)
}
