use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_missing-ensemble")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classification_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    let models = dir.path().join("models");
    let report = dir.path().join("report.json");
    ok(&["synth", "--kind", "classification", "--rows", "300", "--seed", "1", "--out", path(&data)]);
    ok(&["synth", "--kind", "classification", "--rows", "40", "--seed", "2", "--out", path(&test)]);
    assert!(dir.path().join("test.csv.params.json").exists());

    let trained = ok(&[
        "train", "--data", path(&data), "--task", "classification", "--n-avail", "8",
        "--cycles", "100", "--out", path(&models),
    ]);
    assert!(trained.contains("45 members"), "{trained}");

    let table = ok(&[
        "stream", "--ensemble", path(&models.join("ensemble")), "--baseline", path(&models.join("baseline")),
        "--data", path(&test), "--task", "classification", "--missing-count", "1",
        "--generator", path(&dir.path().join("test.csv.params.json")), "--report", path(&report),
    ]);
    assert!(table.contains("ensemble") && table.contains("nn_ga"), "{table}");
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["instances"], 40);
    assert_eq!(json["methods"].as_array().unwrap().len(), 2);
    assert_eq!(json["generator"]["rows"], 40);
}

#[test]
fn regression_workflow_with_imputation() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("plant.csv");
    let models = dir.path().join("models");
    let holes = dir.path().join("holes.csv");
    let filled = dir.path().join("filled.csv");
    let targets = "drum_pressure,steam_flow";
    ok(&["synth", "--kind", "regression", "--rows", "120", "--out", path(&data)]);
    ok(&[
        "train", "--data", path(&data), "--task", "regression", "--targets", targets, "--n-avail", "2",
        "--cycles", "60", "--ae-hidden", "3", "--out", path(&models),
    ]);

    std::fs::write(
        &holes,
        "fuel,air,ref_level,disturbance,drum_pressure,steam_flow\n0.4,,0.5,0.3,8,9\n0.6,0.7,0.5,0.2,9,10\n",
    )
    .unwrap();
    ok(&[
        "impute", "--model", path(&models.join("baseline")), "--in", path(&holes), "--out", path(&filled),
        "--task", "regression", "--targets", targets,
    ]);
    let text = std::fs::read_to_string(&filled).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "fuel,air,ref_level,disturbance,drum_pressure,steam_flow,objective");
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "0.4");
    assert!(first[1].parse::<f64>().is_ok());
    // a complete row is returned unchanged with a zero objective
    assert_eq!(lines[2], "0.6,0.7,0.5,0.2,9,10,0");
}

#[test]
fn configuration_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    ok(&["synth", "--kind", "classification", "--rows", "50", "--out", path(&data)]);
    let bad = run(&[
        "train", "--data", path(&data), "--task", "classification", "--n-avail", "11",
        "--out", path(&dir.path().join("m")),
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let absent = run(&[
        "train", "--data", path(&dir.path().join("nope.csv")), "--task", "classification", "--n-avail", "3",
        "--out", path(&dir.path().join("m")),
    ]);
    assert_eq!(absent.status.code(), Some(7));
    assert_eq!(run(&["stream"]).status.code(), Some(2));
}
