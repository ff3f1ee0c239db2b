use missing_ensemble::ensemble::{EnsembleConfig, EnsembleModel};
use missing_ensemble::fuzzy_artmap::FuzzyArtmapConfig;
use missing_ensemble::harness::{synth_generate, SynthKind};
use missing_ensemble::{Dataset, Task};

#[test]
fn csv_split_and_recombine_round_trip() {
    let (data, _) = synth_generate(SynthKind::Regression, 120, 2);
    let mut buf = Vec::new();
    data.to_csv(&mut buf).unwrap();
    let targets = data.target_names.clone();
    let read = Dataset::from_csv(buf.as_slice(), Task::Regression, Some(&targets)).unwrap();
    assert_eq!(read, data);

    let (a, b) = read.split(0.3, 11).unwrap();
    assert_eq!(a.len(), 36);
    assert_eq!(a.len() + b.len(), data.len());
    let mut rows: Vec<String> = a.instances.iter().chain(&b.instances).map(|i| format!("{i:?}")).collect();
    let mut original: Vec<String> = data.instances.iter().map(|i| format!("{i:?}")).collect();
    rows.sort();
    original.sort();
    assert_eq!(rows, original);
    assert_eq!(read.split(0.3, 11).unwrap(), (a, b));
}

#[test]
fn empty_cells_become_missing() {
    let text = "a,b,c,label\n1,,3,x\n4,5,oops,y\n";
    let d = Dataset::from_csv(text.as_bytes(), Task::Classification, None).unwrap();
    assert_eq!(d.instances[0].missing_indices(), vec![1]);
    assert_eq!(d.instances[1].missing_indices(), vec![2]);
    assert_eq!(d.class_labels, vec!["x", "y"]);
    let mut out = Vec::new();
    d.to_csv(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "a,b,c,label\n1,,3,x\n4,5,,y\n");
}

#[test]
fn values_behind_missing_cells_are_never_read() {
    let (data, _) = synth_generate(SynthKind::Classification, 300, 9);
    let (train, valid) = data.split(0.5, 9).unwrap();
    let model = EnsembleModel::train(&train, &valid, &EnsembleConfig::classification(8, FuzzyArtmapConfig::default())).unwrap();
    for (row, inst) in valid.instances.iter().enumerate() {
        let mut clean = inst.clone();
        clean.set_missing(row % 10);
        clean.set_missing((row + 3) % 10);
        let expected = model.classify(&clean).unwrap();
        for poison in [f64::NAN, 1e300, -1e300] {
            let mut dirty = clean.clone();
            dirty.poison_missing(poison);
            assert_eq!(model.classify(&dirty).unwrap(), expected);
        }
    }
}
