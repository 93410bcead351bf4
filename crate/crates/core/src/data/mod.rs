//! Censored survival observations, outcome binarization and imputation.

mod impute;
mod io;

pub use impute::impute_knn;
pub use io::{load_csv, read_csv, save_csv, write_csv, FeatureColumns, Schema};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    #[error("row {row}: survival time must be positive, got {time}")]
    NonPositiveTime { row: usize, time: f64 },
    #[error("row {row}: event indicator must be 0 or 1, got '{value}'")]
    BadEvent { row: usize, value: String },
    #[error("column '{0}' not found in header")]
    MissingColumn(String),
    #[error("schema must name at least one feature column")]
    NoFeatures,
    #[error("record {index} has {found} covariates, expected {expected}")]
    Dimension {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("dataset needs at least 2 records, got {0}")]
    TooFewRecords(usize),
    #[error("no threshold yields two non-empty classes")]
    NoValidThreshold,
    #[error("binarization at threshold {threshold} leaves class {class} empty")]
    EmptyClass { threshold: f64, class: u8 },
    #[error("feature '{0}' is missing in every record")]
    FeatureAllMissing(String),
    #[error("record {0} shares no observed feature with any candidate neighbor")]
    NoSharedFeatures(usize),
    #[error("k must be positive")]
    ZeroK,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One observation: covariates (possibly missing), time and event indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRecord {
    pub covariates: Vec<Option<f64>>,
    pub time: f64,
    /// `true` when the failure was observed, `false` when censored.
    pub event: bool,
}

impl SurvivalRecord {
    pub fn new(covariates: Vec<Option<f64>>, time: f64, event: bool) -> Self {
        Self {
            covariates,
            time,
            event,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalDataset {
    records: Vec<SurvivalRecord>,
    feature_names: Vec<String>,
}

impl SurvivalDataset {
    /// Validates dimensionality, positivity of times and the minimum size.
    pub fn new(
        records: Vec<SurvivalRecord>,
        feature_names: Vec<String>,
    ) -> Result<Self, DataError> {
        if feature_names.is_empty() {
            return Err(DataError::NoFeatures);
        }
        if records.len() < 2 {
            return Err(DataError::TooFewRecords(records.len()));
        }
        for (index, r) in records.iter().enumerate() {
            if r.covariates.len() != feature_names.len() {
                return Err(DataError::Dimension {
                    index,
                    found: r.covariates.len(),
                    expected: feature_names.len(),
                });
            }
            if !(r.time > 0.0) || !r.time.is_finite() {
                return Err(DataError::NonPositiveTime {
                    row: index + 1,
                    time: r.time,
                });
            }
        }
        Ok(Self {
            records,
            feature_names,
        })
    }

    pub fn records(&self) -> &[SurvivalRecord] {
        &self.records
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn missing_count(&self) -> usize {
        self.records
            .iter()
            .flat_map(|r| r.covariates.iter())
            .filter(|c| c.is_none())
            .count()
    }

    /// `(time, event)` pairs in record order.
    pub fn targets(&self) -> Vec<(f64, bool)> {
        self.records.iter().map(|r| (r.time, r.event)).collect()
    }

    /// Sub-dataset with the records at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, DataError> {
        let records = indices.iter().map(|&i| self.records[i].clone()).collect();
        Self::new(records, self.feature_names.clone())
    }

    /// Reorders the feature columns: output feature `j` is input feature `order[j]`.
    pub fn select_features(&self, order: &[usize]) -> Result<Self, DataError> {
        let records = self
            .records
            .iter()
            .map(|r| SurvivalRecord {
                covariates: order.iter().map(|&j| r.covariates[j]).collect(),
                time: r.time,
                event: r.event,
            })
            .collect();
        let names = order
            .iter()
            .map(|&j| self.feature_names[j].clone())
            .collect();
        Self::new(records, names)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinarizationSpec {
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    /// Event observed at or before the threshold ("early failure").
    Class1,
    /// Survived past the threshold, event or not.
    Class2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinarySample {
    pub covariates: Vec<Option<f64>>,
    pub class_label: ClassLabel,
}

/// Class membership of a single record under threshold `threshold`;
/// `None` for censored records at or before the threshold.
pub fn classify(time: f64, event: bool, threshold: f64) -> Option<ClassLabel> {
    if time > threshold {
        Some(ClassLabel::Class2)
    } else if event {
        Some(ClassLabel::Class1)
    } else {
        None
    }
}

fn class_sizes(data: &SurvivalDataset, threshold: f64) -> (usize, usize) {
    data.records.iter().fold((0, 0), |(c1, c2), r| {
        match classify(r.time, r.event, threshold) {
            Some(ClassLabel::Class1) => (c1 + 1, c2),
            Some(ClassLabel::Class2) => (c1, c2 + 1),
            None => (c1, c2),
        }
    })
}

/// Picks the observed event time that best balances the two classes.
/// Ties go to the smaller threshold.
pub fn select_threshold(data: &SurvivalDataset) -> Result<BinarizationSpec, DataError> {
    let mut event_times: Vec<f64> = data
        .records
        .iter()
        .filter(|r| r.event)
        .map(|r| r.time)
        .collect();
    event_times.sort_by(f64::total_cmp);
    event_times.dedup();

    // Sweep thresholds in increasing order over the time-sorted records.
    let mut sorted: Vec<(f64, bool)> = data.targets();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = sorted.len();

    let mut best: Option<(usize, f64)> = None;
    let mut pos = 0;
    let mut class1 = 0usize;
    for &threshold in &event_times {
        while pos < n && sorted[pos].0 <= threshold {
            if sorted[pos].1 {
                class1 += 1;
            }
            pos += 1;
        }
        let class2 = n - pos;
        if class1 == 0 || class2 == 0 {
            continue;
        }
        let gap = class1.abs_diff(class2);
        if best.is_none_or(|(g, _)| gap < g) {
            best = Some((gap, threshold));
        }
    }
    best.map(|(_, threshold)| BinarizationSpec { threshold })
        .ok_or(DataError::NoValidThreshold)
}

/// Splits records into the two training classes. Censored records with
/// `time <= threshold` are dropped.
pub fn binarize(
    data: &SurvivalDataset,
    spec: BinarizationSpec,
) -> Result<Vec<BinarySample>, DataError> {
    let samples: Vec<BinarySample> = data
        .records
        .iter()
        .filter_map(|r| {
            classify(r.time, r.event, spec.threshold).map(|class_label| BinarySample {
                covariates: r.covariates.clone(),
                class_label,
            })
        })
        .collect();
    let (c1, c2) = class_sizes(data, spec.threshold);
    if c1 == 0 {
        return Err(DataError::EmptyClass {
            threshold: spec.threshold,
            class: 1,
        });
    }
    if c2 == 0 {
        return Err(DataError::EmptyClass {
            threshold: spec.threshold,
            class: 2,
        });
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(rows: &[(f64, bool)]) -> SurvivalDataset {
        let records = rows
            .iter()
            .map(|&(t, e)| SurvivalRecord::new(vec![Some(t)], t, e))
            .collect();
        SurvivalDataset::new(records, vec!["x".into()]).unwrap()
    }

    #[test]
    fn six_events_split_three_three() {
        let d = ds(&[
            (1., true),
            (2., true),
            (3., true),
            (4., true),
            (5., true),
            (6., true),
        ]);
        assert_eq!(select_threshold(&d).unwrap().threshold, 3.0);
    }

    #[test]
    fn single_event_time_without_later_records_fails() {
        let d = ds(&[(2., true), (2., true), (1., false)]);
        assert!(matches!(
            select_threshold(&d),
            Err(DataError::NoValidThreshold)
        ));
    }

    #[test]
    fn binarize_boundaries() {
        let d = ds(&[(2., false), (3., true), (5., false), (1., true)]);
        let out = binarize(&d, BinarizationSpec { threshold: 3.0 }).unwrap();
        let labels: Vec<(f64, ClassLabel)> = out
            .iter()
            .map(|s| (s.covariates[0].unwrap(), s.class_label))
            .collect();
        assert_eq!(
            labels,
            vec![
                (3.0, ClassLabel::Class1),
                (5.0, ClassLabel::Class2),
                (1.0, ClassLabel::Class1)
            ]
        );
    }

    #[test]
    fn binarize_rejects_empty_class() {
        let d = ds(&[(1., true), (2., true)]);
        assert!(matches!(
            binarize(&d, BinarizationSpec { threshold: 5.0 }),
            Err(DataError::EmptyClass { class: 2, .. })
        ));
    }

    #[test]
    fn dataset_rejects_non_positive_time_and_ragged_rows() {
        let bad = vec![
            SurvivalRecord::new(vec![Some(1.0)], 1.0, true),
            SurvivalRecord::new(vec![Some(1.0)], 0.0, true),
        ];
        assert!(matches!(
            SurvivalDataset::new(bad, vec!["x".into()]),
            Err(DataError::NonPositiveTime { row: 2, .. })
        ));
        let ragged = vec![
            SurvivalRecord::new(vec![Some(1.0)], 1.0, true),
            SurvivalRecord::new(vec![Some(1.0), None], 2.0, true),
        ];
        assert!(matches!(
            SurvivalDataset::new(ragged, vec!["x".into()]),
            Err(DataError::Dimension { index: 1, .. })
        ));
    }

    fn arb_targets() -> impl Strategy<Value = Vec<(f64, bool)>> {
        prop::collection::vec((1u32..30, any::<bool>()), 2..60)
            .prop_map(|v| v.into_iter().map(|(t, e)| (t as f64, e)).collect())
    }

    proptest! {
        #[test]
        fn threshold_is_optimal_against_exhaustive_scan(rows in arb_targets()) {
            let d = ds(&rows);
            let mut best: Option<(usize, f64)> = None;
            for &(t, e) in &rows {
                if !e { continue; }
                let c1 = rows.iter().filter(|r| r.1 && r.0 <= t).count();
                let c2 = rows.iter().filter(|r| r.0 > t).count();
                if c1 == 0 || c2 == 0 { continue; }
                let gap = c1.abs_diff(c2);
                best = match best {
                    Some((g, bt)) if g < gap || (g == gap && bt <= t) => Some((g, bt)),
                    _ => Some((gap, t)),
                };
            }
            match (select_threshold(&d), best) {
                (Ok(spec), Some((_, t))) => prop_assert_eq!(spec.threshold, t),
                (Err(DataError::NoValidThreshold), None) => {}
                (got, want) => prop_assert!(false, "got {:?}, want {:?}", got, want),
            }
        }

        #[test]
        fn censored_early_records_never_classified(rows in arb_targets()) {
            let d = ds(&rows);
            if let Ok(spec) = select_threshold(&d) {
                let samples = binarize(&d, spec).unwrap();
                let early_censored = rows.iter().filter(|r| !r.1 && r.0 <= spec.threshold).count();
                prop_assert_eq!(samples.len(), rows.len() - early_censored);
                for s in &samples {
                    let t = s.covariates[0].unwrap();
                    match s.class_label {
                        ClassLabel::Class1 => prop_assert!(t <= spec.threshold),
                        ClassLabel::Class2 => prop_assert!(t > spec.threshold),
                    }
                }
            }
        }
    }
}
