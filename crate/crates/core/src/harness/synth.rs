//! Synthetic stand-ins for condition-monitoring data.
//!
//! * Classification: ten gas-concentration-like readings, two conditions
//!   ("healthy", "faulty"). Five latent degradation levels are drawn from
//!   overlapping per-class boxes; every latent level drives a pair of
//!   redundant readings, so most feature subsets stay informative.
//! * Regression: a steam-generator-like plant with inputs fuel, air,
//!   reference level and disturbance (load), and smooth nonlinear outputs
//!   drum pressure and steam flow.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Instance, Target, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    Classification,
    Regression,
}

/// Generator settings, echoed into run reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub kind: SynthKind,
    pub rows: usize,
    pub seed: u64,
    pub description: String,
}

const GASES: [&str; 10] = [
    "h2", "ch4", "c2h6", "c2h4", "c2h2", "co", "co2", "o2", "n2", "tdcg",
];

/// Rows are faulty when the mean latent level exceeds 0.5. Rows closer than
/// `MARGIN` to that boundary are redrawn. Each reading's per-class range
/// overlaps heavily; only combinations separate the classes.
const MARGIN: f64 = 0.02;
const READING_NOISE: f64 = 0.02;

pub fn generate(kind: SynthKind, rows: usize, seed: u64) -> (Dataset, SynthParams) {
    let data = match kind {
        SynthKind::Classification => classification(rows, seed),
        SynthKind::Regression => regression(rows, seed),
    };
    let description = match kind {
        SynthKind::Classification => format!(
            "10 readings from 5 latent levels U(0,1) (two readings each); faulty iff mean level > 0.5, margin {MARGIN}, noise sd {READING_NOISE}"
        ),
        SynthKind::Regression => {
            "inputs fuel/air/ref_level/disturbance; outputs drum_pressure, steam_flow; noise sd 0.01".to_string()
        }
    };
    (
        data,
        SynthParams {
            kind,
            rows,
            seed,
            description,
        },
    )
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn classification(rows: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances = (0..rows)
        .map(|_| {
            let (levels, faulty) = loop {
                let z: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..1.0)).collect();
                let score = z.iter().sum::<f64>() / 5.0;
                if (score - 0.5).abs() >= MARGIN {
                    break (z, score > 0.5);
                }
            };
            let mut features = Vec::with_capacity(10);
            for (k, &z) in levels.iter().enumerate() {
                let scale = 100.0 * (k + 1) as f64;
                // a linear and a saturating reading of the same level
                let a = z + READING_NOISE * gauss(&mut rng);
                let b = (1.0 - (-2.0 * z).exp()) / (1.0 - (-2.0f64).exp()) + READING_NOISE * gauss(&mut rng);
                features.push(scale * a);
                features.push(0.5 * scale * b + 10.0);
            }
            // linear readings first, then the saturating ones: pairs are (k, k + 5)
            let features: Vec<f64> = (0..10)
                .map(|i| if i < 5 { features[2 * i] } else { features[2 * (i - 5) + 1] })
                .collect();
            let label = if faulty { "faulty" } else { "healthy" };
            Instance::complete(features, Some(Target::Class(label.to_string())))
        })
        .collect();
    Dataset::new(
        instances,
        GASES.iter().map(|s| s.to_string()).collect(),
        vec!["condition".to_string()],
        Task::Classification,
        vec!["faulty".to_string(), "healthy".to_string()],
    )
    .expect("generator output is well formed")
}

/// Noise-free plant outputs for inputs `[fuel, air, ref_level, disturbance]`.
pub fn plant_outputs(x: &[f64]) -> [f64; 2] {
    let (fuel, air, level, load) = (x[0], x[1], x[2], x[3]);
    let ratio = air / (fuel + 0.1);
    let drum_pressure = 8.0 + 6.0 * (2.0 * (fuel - 0.5)).tanh() + 1.5 * (ratio - 1.0) - 2.0 * level;
    let steam_flow = 5.0 + 10.0 * load * (0.5 + fuel) + 3.0 * (1.0 - level).powi(2);
    [drum_pressure, steam_flow]
}

fn regression(rows: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances = (0..rows)
        .map(|_| {
            let load: f64 = rng.random_range(0.0..1.0);
            let fuel = (0.15 + 0.7 * load + 0.08 * gauss(&mut rng)).clamp(0.0, 1.0);
            let air = (1.05 * fuel + 0.05 + 0.05 * gauss(&mut rng)).clamp(0.0, 1.2);
            let level = (0.5 + 0.3 * (load - 0.5) + 0.1 * gauss(&mut rng)).clamp(0.0, 1.0);
            let x = vec![fuel, air, level, load];
            let y = plant_outputs(&x);
            let y = vec![y[0] + 0.01 * gauss(&mut rng), y[1] + 0.01 * gauss(&mut rng)];
            Instance::complete(x, Some(Target::Values(y)))
        })
        .collect();
    Dataset::new(
        instances,
        ["fuel", "air", "ref_level", "disturbance"].iter().map(|s| s.to_string()).collect(),
        vec!["drum_pressure".to_string(), "steam_flow".to_string()],
        Task::Regression,
        vec![],
    )
    .expect("generator output is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_seed_gives_identical_csv() {
        for kind in [SynthKind::Classification, SynthKind::Regression] {
            let mut a = Vec::new();
            let mut b = Vec::new();
            generate(kind, 50, 9).0.to_csv(&mut a).unwrap();
            generate(kind, 50, 9).0.to_csv(&mut b).unwrap();
            assert_eq!(a, b);
            let mut c = Vec::new();
            generate(kind, 50, 10).0.to_csv(&mut c).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn shapes() {
        let (c, _) = generate(SynthKind::Classification, 30, 1);
        assert_eq!((c.len(), c.n_features()), (30, 10));
        let (r, _) = generate(SynthKind::Regression, 30, 1);
        assert_eq!((r.len(), r.n_features(), r.target_names.len()), (30, 4, 2));
    }

    #[test]
    fn plant_outputs_respond_to_every_input() {
        let base = [0.5, 0.55, 0.5, 0.5];
        let h = 1e-4;
        for i in 0..4 {
            let mut up = base;
            let mut down = base;
            up[i] += h;
            down[i] -= h;
            let (yu, yd) = (plant_outputs(&up), plant_outputs(&down));
            let sensitivity: f64 = (0..2).map(|k| ((yu[k] - yd[k]) / (2.0 * h)).abs()).sum();
            assert!(sensitivity > 1e-3, "input {i} has no effect");
        }
    }
}
