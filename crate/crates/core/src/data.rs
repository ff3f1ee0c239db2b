//! Dataset representation with an explicit per-cell missingness mask, feature
//! subsets, min-max scaling and seeded train/validation splitting.
//!
//! A missing cell carries whatever number happens to sit in `features`; it is
//! never read by any numeric routine. Accessors go through the mask.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Target {
    Class(String),
    Values(Vec<f64>),
}

impl Target {
    pub fn as_class(&self) -> Option<&str> {
        match self {
            Target::Class(label) => Some(label),
            Target::Values(_) => None,
        }
    }

    pub fn as_values(&self) -> Option<&[f64]> {
        match self {
            Target::Values(v) => Some(v),
            Target::Class(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    features: Vec<f64>,
    mask: Vec<bool>,
    pub target: Option<Target>,
}

impl Instance {
    pub fn new(features: Vec<f64>, mask: Vec<bool>, target: Option<Target>) -> Result<Self> {
        if features.len() != mask.len() {
            return Err(Error::invalid(format!(
                "{} feature values but {} mask entries",
                features.len(),
                mask.len()
            )));
        }
        Ok(Instance {
            features,
            mask,
            target,
        })
    }

    /// An instance with every feature present.
    pub fn complete(features: Vec<f64>, target: Option<Target>) -> Self {
        let mask = vec![true; features.len()];
        Instance {
            features,
            mask,
            target,
        }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_present(&self, i: usize) -> bool {
        self.mask[i]
    }

    /// Value of feature `i`, or `None` when it is missing.
    pub fn value(&self, i: usize) -> Option<f64> {
        self.mask[i].then(|| self.features[i])
    }

    pub fn is_complete(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    pub fn missing_indices(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| !self.mask[i]).collect()
    }

    pub fn missing_count(&self) -> usize {
        self.mask.iter().filter(|&&m| !m).count()
    }

    /// All feature values. Panics if any is missing.
    pub fn complete_values(&self) -> &[f64] {
        assert!(self.is_complete(), "instance has missing features");
        &self.features
    }

    pub fn set_missing(&mut self, i: usize) {
        self.mask[i] = false;
    }

    pub fn set_value(&mut self, i: usize, value: f64) {
        self.features[i] = value;
        self.mask[i] = true;
    }

    /// Overwrite the storage behind missing cells. Test hook for checking that
    /// nothing reads them.
    #[doc(hidden)]
    pub fn poison_missing(&mut self, poison: f64) {
        for (v, &m) in self.features.iter_mut().zip(&self.mask) {
            if !m {
                *v = poison;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub instances: Vec<Instance>,
    pub feature_names: Vec<String>,
    pub target_names: Vec<String>,
    pub task: Task,
    /// Label vocabulary, sorted. Empty for regression.
    pub class_labels: Vec<String>,
}

impl Dataset {
    pub fn new(
        instances: Vec<Instance>,
        feature_names: Vec<String>,
        target_names: Vec<String>,
        task: Task,
        class_labels: Vec<String>,
    ) -> Result<Self> {
        let n = feature_names.len();
        for (row, inst) in instances.iter().enumerate() {
            if inst.len() != n {
                return Err(Error::invalid(format!(
                    "row {row} has {} features, expected {n}",
                    inst.len()
                )));
            }
            match (&inst.target, task) {
                (None, _) => {}
                (Some(Target::Class(label)), Task::Classification) => {
                    if !class_labels.contains(label) {
                        return Err(Error::invalid(format!(
                            "row {row}: label `{label}` not in the class vocabulary"
                        )));
                    }
                }
                (Some(Target::Values(v)), Task::Regression) => {
                    if v.len() != target_names.len() {
                        return Err(Error::invalid(format!(
                            "row {row} has {} targets, expected {}",
                            v.len(),
                            target_names.len()
                        )));
                    }
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "row {row}: target kind does not match task {task:?}"
                    )))
                }
            }
        }
        Ok(Dataset {
            instances,
            feature_names,
            target_names,
            task,
            class_labels,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// A dataset with the same schema holding `instances`.
    pub fn with_instances(&self, instances: Vec<Instance>) -> Dataset {
        Dataset {
            instances,
            feature_names: self.feature_names.clone(),
            target_names: self.target_names.clone(),
            task: self.task,
            class_labels: self.class_labels.clone(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.instances.iter().all(Instance::is_complete)
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.class_labels.iter().position(|l| l == label)
    }

    /// Shuffle with `seed`, then cut the first `round(train_fraction * len)`
    /// rows off as the training part.
    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "train fraction {train_fraction} outside (0, 1)"
            )));
        }
        if self.len() < 2 {
            return Err(Error::invalid(format!(
                "cannot split a dataset of {} instance(s)",
                self.len()
            )));
        }
        let order = split_permutation(self.len(), seed);
        let cut = ((train_fraction * self.len() as f64).round() as usize).clamp(1, self.len() - 1);
        let pick = |idx: &[usize]| idx.iter().map(|&i| self.instances[i].clone()).collect();
        Ok((
            self.with_instances(pick(&order[..cut])),
            self.with_instances(pick(&order[cut..])),
        ))
    }

    /// Read a CSV with a header row. Empty or non-numeric feature cells become
    /// missing. `targets` names the target columns; by default the last column.
    pub fn from_csv<R: Read>(reader: R, task: Task, targets: Option<&[String]>) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if header.len() < 2 {
            return Err(Error::invalid("CSV needs at least one feature and one target column"));
        }
        let target_cols: Vec<usize> = match targets {
            None => vec![header.len() - 1],
            Some(names) => names
                .iter()
                .map(|name| {
                    header
                        .iter()
                        .position(|h| h == name)
                        .ok_or_else(|| Error::invalid(format!("no column named `{name}`")))
                })
                .collect::<Result<_>>()?,
        };
        if task == Task::Classification && target_cols.len() != 1 {
            return Err(Error::invalid("classification takes exactly one target column"));
        }
        let feature_cols: Vec<usize> = (0..header.len()).filter(|c| !target_cols.contains(c)).collect();

        let mut instances = Vec::new();
        let mut labels = std::collections::BTreeSet::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != header.len() {
                return Err(Error::invalid(format!("row {row} has {} cells", record.len())));
            }
            let mut features = Vec::with_capacity(feature_cols.len());
            let mut mask = Vec::with_capacity(feature_cols.len());
            for &c in &feature_cols {
                match parse_cell(&record[c]) {
                    Some(v) => {
                        features.push(v);
                        mask.push(true);
                    }
                    None => {
                        features.push(0.0);
                        mask.push(false);
                    }
                }
            }
            let target = match task {
                Task::Classification => {
                    let label = record[target_cols[0]].trim();
                    (!label.is_empty()).then(|| {
                        labels.insert(label.to_string());
                        Target::Class(label.to_string())
                    })
                }
                Task::Regression => {
                    let values: Option<Vec<f64>> =
                        target_cols.iter().map(|&c| parse_cell(&record[c])).collect();
                    values.map(Target::Values)
                }
            };
            instances.push(Instance::new(features, mask, target)?);
        }
        Dataset::new(
            instances,
            feature_cols.iter().map(|&c| header[c].clone()).collect(),
            target_cols.iter().map(|&c| header[c].clone()).collect(),
            task,
            labels.into_iter().collect(),
        )
    }

    /// Write features then targets; missing cells are left empty. Floats are
    /// written in shortest round-trip form.
    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        self.to_csv_with_extra(writer, None)
    }

    /// As [`Dataset::to_csv`], appending one extra numeric column.
    pub fn to_csv_with_extra<W: Write>(&self, writer: W, extra: Option<(&str, &[f64])>) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.extend(self.target_names.iter().map(String::as_str));
        if let Some((name, _)) = extra {
            header.push(name);
        }
        wtr.write_record(&header)?;
        for (row, inst) in self.instances.iter().enumerate() {
            let mut cells: Vec<String> = (0..inst.len())
                .map(|i| inst.value(i).map(|v| v.to_string()).unwrap_or_default())
                .collect();
            match &inst.target {
                Some(Target::Class(label)) => cells.push(label.clone()),
                Some(Target::Values(v)) => cells.extend(v.iter().map(|x| x.to_string())),
                None => cells.extend(std::iter::repeat_n(String::new(), self.target_names.len())),
            }
            if let Some((_, values)) = extra {
                cells.push(values[row].to_string());
            }
            wtr.write_record(&cells)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

pub(crate) fn split_permutation(len: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Sorted, duplicate-free set of feature indices used by one ensemble member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSubset {
    indices: Vec<usize>,
}

impl FeatureSubset {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("empty feature subset"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "subset {indices:?} is not strictly ascending"
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::invalid(format!("feature index {bad} out of range for {n} features")));
        }
        Ok(FeatureSubset { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// First subset feature that is missing in `mask`, if any.
    pub fn first_missing(&self, mask: &[bool]) -> Option<usize> {
        self.indices.iter().copied().find(|&i| !mask[i])
    }

    pub fn is_available(&self, mask: &[bool]) -> bool {
        self.first_missing(mask).is_none()
    }
}

/// Per-column min-max scaler fitted on present training values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl FeatureScaler {
    /// Fit on the feature columns of `train`, ignoring missing cells.
    pub fn fit(train: &Dataset) -> Result<Self> {
        let n = train.n_features();
        let mut min = vec![f64::INFINITY; n];
        let mut max = vec![f64::NEG_INFINITY; n];
        for inst in &train.instances {
            for i in 0..n {
                if let Some(v) = inst.value(i) {
                    min[i] = min[i].min(v);
                    max[i] = max[i].max(v);
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| min[i] > max[i]) {
            return Err(Error::UnscalableFeature(train.feature_names[i].clone()));
        }
        Ok(FeatureScaler { min, max })
    }

    /// Fit on the regression targets of `train`.
    pub fn fit_targets(train: &Dataset) -> Result<Self> {
        let k = train.target_names.len();
        let mut min = vec![f64::INFINITY; k];
        let mut max = vec![f64::NEG_INFINITY; k];
        for inst in &train.instances {
            if let Some(v) = inst.target.as_ref().and_then(Target::as_values) {
                for j in 0..k {
                    min[j] = min[j].min(v[j]);
                    max[j] = max[j].max(v[j]);
                }
            }
        }
        if let Some(j) = (0..k).find(|&j| min[j] > max[j]) {
            return Err(Error::UnscalableFeature(train.target_names[j].clone()));
        }
        Ok(FeatureScaler { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Map column `i` to [0, 1], clipping out-of-range values. A constant
    /// column maps everything to 0.
    pub fn scale(&self, i: usize, value: f64) -> f64 {
        let range = self.max[i] - self.min[i];
        if range <= 0.0 {
            return 0.0;
        }
        ((value - self.min[i]) / range).clamp(0.0, 1.0)
    }

    /// Inverse of [`FeatureScaler::scale`] without clipping.
    pub fn unscale(&self, i: usize, scaled: f64) -> f64 {
        self.min[i] + scaled * (self.max[i] - self.min[i])
    }

    pub fn scale_all(&self, values: &[f64]) -> Vec<f64> {
        values.iter().enumerate().map(|(i, &v)| self.scale(i, v)).collect()
    }

    pub fn unscale_all(&self, scaled: &[f64]) -> Vec<f64> {
        scaled.iter().enumerate().map(|(i, &v)| self.unscale(i, v)).collect()
    }

    /// Scaled values of `subset`, in index order. Fails with
    /// [`Error::MemberUnusable`] when a subset feature is missing.
    pub fn project(&self, instance: &Instance, subset: &FeatureSubset) -> Result<Vec<f64>> {
        if let Some(missing) = subset.first_missing(instance.mask()) {
            return Err(Error::MemberUnusable(missing));
        }
        Ok(subset
            .indices()
            .iter()
            .map(|&i| self.scale(i, instance.features[i]))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(rows: usize) -> Dataset {
        let instances = (0..rows)
            .map(|r| Instance::complete(vec![r as f64, 2.0 * r as f64], Some(Target::Class(format!("c{}", r % 2)))))
            .collect();
        Dataset::new(
            instances,
            vec!["a".into(), "b".into()],
            vec!["label".into()],
            Task::Classification,
            vec!["c0".into(), "c1".into()],
        )
        .unwrap()
    }

    #[test]
    fn split_sizes() {
        let (t, v) = toy(4000).split(0.5, 1).unwrap();
        assert_eq!((t.len(), v.len()), (2000, 2000));
        let (t, v) = toy(2).split(0.5, 1).unwrap();
        assert_eq!((t.len(), v.len()), (1, 1));
    }

    #[test]
    fn split_errors() {
        assert!(matches!(toy(0).split(0.5, 1), Err(Error::InvalidInput(_))));
        assert!(matches!(toy(1).split(0.5, 1), Err(Error::InvalidInput(_))));
        assert!(toy(10).split(1.0, 1).is_err());
        assert!(toy(10).split(0.0, 1).is_err());
    }

    #[test]
    fn split_is_seeded() {
        let data = toy(100);
        let a = data.split(0.5, 7).unwrap();
        let b = data.split(0.5, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(split_permutation(100, 7), split_permutation(100, 8));
    }

    #[test]
    fn split_recombines_to_original() {
        let data = toy(37);
        let (t, v) = data.split(0.3, 3).unwrap();
        let mut firsts: Vec<f64> = t
            .instances
            .iter()
            .chain(&v.instances)
            .map(|i| i.value(0).unwrap())
            .collect();
        firsts.sort_by(f64::total_cmp);
        assert_eq!(firsts, (0..37).map(|r| r as f64).collect::<Vec<_>>());
    }

    fn column(values: &[Option<f64>]) -> Dataset {
        let instances = values
            .iter()
            .map(|v| Instance::new(vec![v.unwrap_or(f64::NAN)], vec![v.is_some()], None).unwrap())
            .collect();
        Dataset::new(instances, vec!["x".into()], vec!["y".into()], Task::Regression, vec![]).unwrap()
    }

    #[test]
    fn scaler_ignores_missing() {
        let s = FeatureScaler::fit(&column(&[Some(0.0), Some(10.0), None])).unwrap();
        assert_eq!((s.min[0], s.max[0]), (0.0, 10.0));
        assert_eq!(s.scale(0, 5.0), 0.5);
        assert_eq!(s.scale(0, 12.0), 1.0);
        assert_eq!(s.scale(0, -3.0), 0.0);
    }

    #[test]
    fn scaler_constant_column_maps_to_zero() {
        let s = FeatureScaler::fit(&column(&[Some(3.0), Some(3.0), Some(3.0)])).unwrap();
        assert_eq!((s.min[0], s.max[0]), (3.0, 3.0));
        assert_eq!(s.scale(0, 3.0), 0.0);
        assert_eq!(s.scale(0, 100.0), 0.0);
    }

    #[test]
    fn scaler_rejects_all_missing_feature() {
        match FeatureScaler::fit(&column(&[None, None])) {
            Err(Error::UnscalableFeature(name)) => assert_eq!(name, "x"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn project_selects_and_guards_missing() {
        let scaler = FeatureScaler {
            min: vec![0.0; 5],
            max: vec![10.0; 5],
        };
        let full = Instance::complete(vec![1.0, 2.0, 3.0, 4.0, 5.0], None);
        let abc = FeatureSubset::new(vec![0, 1, 2], 5).unwrap();
        assert_eq!(scaler.project(&full, &abc).unwrap(), vec![0.1, 0.2, 0.3]);

        let mut no_a = full.clone();
        no_a.set_missing(0);
        assert!(matches!(scaler.project(&no_a, &abc), Err(Error::MemberUnusable(0))));

        let mut no_ab = no_a.clone();
        no_ab.set_missing(1);
        no_ab.poison_missing(f64::NAN);
        let cde = FeatureSubset::new(vec![2, 3, 4], 5).unwrap();
        let out = scaler.project(&no_ab, &cde).unwrap();
        assert!(out.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn subset_validation() {
        assert!(FeatureSubset::new(vec![0, 2, 4], 5).is_ok());
        assert!(FeatureSubset::new(vec![2, 1], 5).is_err());
        assert!(FeatureSubset::new(vec![1, 1], 5).is_err());
        assert!(FeatureSubset::new(vec![0, 5], 5).is_err());
    }

    #[test]
    fn csv_missing_cells_become_masked() {
        let text = "a,b,label\n1.5,,x\nfoo,2,y\n3,4,x\n";
        let data = Dataset::from_csv(text.as_bytes(), Task::Classification, None).unwrap();
        assert_eq!(data.feature_names, vec!["a", "b"]);
        assert_eq!(data.class_labels, vec!["x", "y"]);
        assert_eq!(data.instances[0].mask(), &[true, false]);
        assert_eq!(data.instances[1].mask(), &[false, true]);
        assert_eq!(data.instances[2].value(1), Some(4.0));

        let mut out = Vec::new();
        data.to_csv(&mut out).unwrap();
        let again = Dataset::from_csv(out.as_slice(), Task::Classification, None).unwrap();
        assert_eq!(again, data.clone().with_instances(again.instances.clone()));
        for (a, b) in again.instances.iter().zip(&data.instances) {
            assert_eq!(a.mask(), b.mask());
            for i in 0..2 {
                assert_eq!(a.value(i), b.value(i));
            }
        }
    }

    #[test]
    fn csv_named_regression_targets() {
        let text = "y1,a,b,y2\n1,2,3,4\n5,6,,8\n";
        let targets = vec!["y1".to_string(), "y2".to_string()];
        let data = Dataset::from_csv(text.as_bytes(), Task::Regression, Some(&targets)).unwrap();
        assert_eq!(data.feature_names, vec!["a", "b"]);
        assert_eq!(data.instances[1].target, Some(Target::Values(vec![5.0, 8.0])));
        assert!(!data.instances[1].is_present(1));
    }
}
