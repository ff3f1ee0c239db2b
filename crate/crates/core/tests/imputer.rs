use missing_ensemble::ga::GaConfig;
use missing_ensemble::imputer::ImputerModel;
use missing_ensemble::mlp::TrainConfig;
use missing_ensemble::{Dataset, Instance, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dataset(rows: Vec<Vec<f64>>) -> Dataset {
    let n = rows[0].len();
    Dataset::new(
        rows.into_iter().map(|r| Instance::complete(r, None)).collect(),
        (0..n).map(|i| format!("x{i}")).collect(),
        vec![],
        Task::Regression,
        vec![],
    )
    .unwrap()
}

/// x1 in [0, 0.5] and x2 = 2 x1, so both scale onto [0, 1] with x2's scaled
/// value equal to its raw value.
fn doubling_rule(rows: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<Vec<f64>> = (0..rows)
        .map(|_| {
            let x1: f64 = rng.random_range(0.0..0.5);
            vec![x1, 2.0 * x1]
        })
        .collect();
    data.push(vec![0.0, 0.0]);
    data.push(vec![0.5, 1.0]);
    dataset(data)
}

/// Rank-2 data in [0, 1]^4.
fn subspace(rows: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    dataset(
        (0..rows)
            .map(|_| {
                let (u, v): (f64, f64) = (rng.random(), rng.random());
                vec![0.5 * u + 0.5 * v, u, 0.25 + 0.5 * v, 0.8 * u + 0.2 * (1.0 - v)]
            })
            .collect(),
    )
}

fn with_missing(values: Vec<f64>, missing: &[usize]) -> Instance {
    let mut inst = Instance::complete(values, None);
    for &i in missing {
        inst.set_missing(i);
    }
    inst
}

#[test]
fn objective_prefers_rule_following_candidate() {
    let data = doubling_rule(200, 1);
    let (model, _) = ImputerModel::fit(&data, 1, &TrainConfig { seed: 1, ..Default::default() }).unwrap();
    let probe = with_missing(vec![0.3, 0.0], &[1]);
    let near = model.objective(&probe, &[0.6]).unwrap();
    let far = model.objective(&probe, &[0.9]).unwrap();
    assert!(near < far, "{near} !< {far}");
}

#[test]
fn imputes_doubling_rule() {
    let hits = (0..10)
        .filter(|&seed| {
            let data = doubling_rule(200, seed);
            let (model, _) = ImputerModel::fit(&data, 1, &TrainConfig { seed, ..Default::default() }).unwrap();
            let probe = with_missing(vec![0.3, 0.0], &[1]);
            let out = model.impute(&probe, &GaConfig { seed, ..Default::default() }).unwrap();
            assert_eq!(out.instance.value(0).unwrap().to_bits(), 0.3f64.to_bits());
            let scaled = model.scaler.scale(1, out.instance.value(1).unwrap());
            (scaled - 0.6).abs() <= 0.1
        })
        .count();
    assert!(hits >= 8, "{hits}/10");
}

#[test]
fn trained_fixed_point_has_near_zero_objective() {
    let data = subspace(200, 8);
    let (model, _) = ImputerModel::fit(&data, 3, &TrainConfig { seed: 5, ..Default::default() }).unwrap();
    let net = model.autoencoder.as_ref().unwrap();
    let scaled: Vec<Vec<f64>> = data
        .instances
        .iter()
        .map(|i| model.scaler.scale_all(i.complete_values()))
        .collect();
    assert!(net.mse(&scaled, &scaled).unwrap() < 1e-3);
    let best = data
        .instances
        .iter()
        .map(|i| model.objective(i, &[]).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1e-6, "smallest training-vector objective {best}");
}

#[test]
fn two_missing_beats_midpoint_and_keeps_known_values() {
    let data = subspace(200, 8);
    let (model, _) = ImputerModel::fit(&data, 3, &TrainConfig { seed: 5, ..Default::default() }).unwrap();
    for (row, seed) in [(3usize, 1u64), (17, 2), (40, 3)] {
        let original = data.instances[row].clone();
        let mut probe = original.clone();
        probe.set_missing(1);
        probe.set_missing(3);
        probe.poison_missing(f64::NAN);
        let out = model.impute(&probe, &GaConfig { seed, ..Default::default() }).unwrap();
        let midpoint = model.objective(&probe, &[0.5, 0.5]).unwrap();
        assert!(out.objective <= midpoint);
        assert!(out.instance.is_complete());
        for i in [0, 2] {
            assert_eq!(out.instance.value(i).unwrap().to_bits(), original.value(i).unwrap().to_bits());
        }
        let genes: Vec<f64> = [1, 3].iter().map(|&i| model.scaler.scale(i, out.instance.value(i).unwrap())).collect();
        let recomputed = model.objective(&probe, &genes).unwrap();
        assert!((recomputed - out.objective).abs() < 1e-9);
    }
}
