use super::{DataError, SurvivalDataset, SurvivalRecord};

/// Per-feature mean and standard deviation over the observed values.
fn feature_moments(data: &SurvivalDataset) -> Result<Vec<(f64, f64)>, DataError> {
    (0..data.n_features())
        .map(|j| {
            let vals: Vec<f64> = data
                .records()
                .iter()
                .filter_map(|r| r.covariates[j])
                .collect();
            if vals.is_empty() {
                return Err(DataError::FeatureAllMissing(
                    data.feature_names()[j].clone(),
                ));
            }
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let var = if vals.len() > 1 {
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            // A constant feature only gets centered.
            let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
            Ok((mean, sd))
        })
        .collect()
}

/// Distance over the standardized features observed in both rows, divided by
/// the number of such features. `None` if the rows share no observed feature.
fn distance(a: &[Option<f64>], b: &[Option<f64>]) -> Option<f64> {
    let (sum, shared) = a
        .iter()
        .zip(b)
        .filter_map(|(x, y)| Some((x.as_ref()? - y.as_ref()?).powi(2)))
        .fold((0.0, 0usize), |(s, n), d| (s + d, n + 1));
    (shared > 0).then(|| sum.sqrt() / shared as f64)
}

/// k-nearest-neighbor imputation of every missing covariate.
///
/// Features are standardized before measuring distances; the imputed value is
/// the plain mean of the neighbors' raw values. When fewer than `k` records
/// observe the feature, all of them are used. Non-missing cells are never
/// touched.
pub fn impute_knn(data: &SurvivalDataset, k: usize) -> Result<SurvivalDataset, DataError> {
    if k == 0 {
        return Err(DataError::ZeroK);
    }
    if data.missing_count() == 0 {
        return Ok(data.clone());
    }
    let moments = feature_moments(data)?;
    let standardized: Vec<Vec<Option<f64>>> = data
        .records()
        .iter()
        .map(|r| {
            r.covariates
                .iter()
                .zip(&moments)
                .map(|(c, (mean, sd))| c.map(|v| (v - mean) / sd))
                .collect()
        })
        .collect();

    let mut records: Vec<SurvivalRecord> = data.records().to_vec();
    for (i, record) in records.iter_mut().enumerate() {
        if record.covariates.iter().all(Option::is_some) {
            continue;
        }
        // Neighbors ranked once per record by (distance, index).
        let mut neighbors: Vec<(f64, usize)> = standardized
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .filter_map(|(j, other)| distance(&standardized[i], other).map(|d| (d, j)))
            .collect();
        neighbors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for f in 0..record.covariates.len() {
            if record.covariates[f].is_some() {
                continue;
            }
            let chosen: Vec<f64> = neighbors
                .iter()
                .filter_map(|&(_, j)| data.records()[j].covariates[f])
                .take(k)
                .collect();
            if chosen.is_empty() {
                return Err(DataError::NoSharedFeatures(i));
            }
            record.covariates[f] = Some(chosen.iter().sum::<f64>() / chosen.len() as f64);
        }
    }
    SurvivalDataset::new(records, data.feature_names().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(rows: Vec<Vec<Option<f64>>>) -> SurvivalDataset {
        let m = rows[0].len();
        let records = rows
            .into_iter()
            .enumerate()
            .map(|(i, c)| SurvivalRecord::new(c, 1.0 + i as f64, i % 2 == 0))
            .collect();
        SurvivalDataset::new(records, (0..m).map(|j| format!("f{j}")).collect()).unwrap()
    }

    #[test]
    fn complete_dataset_is_unchanged() {
        let d = ds(vec![vec![Some(1.0), Some(2.0)], vec![Some(3.0), Some(4.0)]]);
        assert_eq!(impute_knn(&d, 5).unwrap(), d);
    }

    #[test]
    fn six_rows_one_missing_matches_brute_force() {
        let rows = vec![
            vec![Some(0.0), Some(1.0), None],
            vec![Some(0.1), Some(1.2), Some(10.0)],
            vec![Some(0.5), Some(0.7), Some(20.0)],
            vec![Some(2.0), Some(3.0), Some(30.0)],
            vec![Some(-1.0), Some(0.0), Some(40.0)],
            vec![Some(5.0), Some(9.0), Some(50.0)],
        ];
        let d = ds(rows.clone());

        // Oracle: standardize the two shared features by hand, rank the five
        // candidates by Euclidean distance / 2.
        let col = |j: usize| rows.iter().map(|r| r[j].unwrap()).collect::<Vec<_>>();
        let z = |v: Vec<f64>| {
            let n = v.len() as f64;
            let m = v.iter().sum::<f64>() / n;
            let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            v.into_iter().map(|x| (x - m) / s).collect::<Vec<_>>()
        };
        let (z0, z1) = (z(col(0)), z(col(1)));
        let mut ranked: Vec<(f64, usize)> = (1..6)
            .map(|j| {
                (
                    (((z0[0] - z0[j]).powi(2) + (z1[0] - z1[j]).powi(2)).sqrt() / 2.0),
                    j,
                )
            })
            .collect();
        ranked.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected: f64 = ranked
            .iter()
            .take(5)
            .map(|&(_, j)| rows[j][2].unwrap())
            .sum::<f64>()
            / 5.0;
        assert_eq!(expected, 30.0);

        let out = impute_knn(&d, 5).unwrap();
        assert!((out.records()[0].covariates[2].unwrap() - expected).abs() < 1e-12);

        // k = 2: the two nearest by the same ranking.
        let expected2: f64 = ranked
            .iter()
            .take(2)
            .map(|&(_, j)| rows[j][2].unwrap())
            .sum::<f64>()
            / 2.0;
        let out2 = impute_knn(&d, 2).unwrap();
        assert!((out2.records()[0].covariates[2].unwrap() - expected2).abs() < 1e-12);
        assert_eq!(expected2, 15.0);
    }

    #[test]
    fn single_feature_has_nothing_to_compare() {
        let d = ds(vec![vec![Some(1.0)], vec![None], vec![Some(3.0)]]);
        assert!(matches!(
            impute_knn(&d, 5),
            Err(DataError::NoSharedFeatures(1))
        ));
    }

    #[test]
    fn feature_missing_everywhere_is_an_error() {
        let d = ds(vec![vec![Some(1.0), None], vec![Some(2.0), None]]);
        assert!(matches!(impute_knn(&d, 5), Err(DataError::FeatureAllMissing(f)) if f == "f1"));
    }

    proptest! {
        #[test]
        fn observed_cells_kept_and_output_complete(
            rows in prop::collection::vec(
                prop::collection::vec(prop::option::weighted(0.8, -10.0f64..10.0), 3),
                4..25,
            )
        ) {
            // Ensure every record has at least one value and every feature one observation.
            let mut rows = rows;
            for r in rows.iter_mut() {
                if r.iter().all(Option::is_none) { r[0] = Some(0.5); }
            }
            for c in &mut rows[0][..3] { *c = c.or(Some(1.0)); }
            let d = ds(rows);
            let out = impute_knn(&d, 5).unwrap();
            prop_assert_eq!(out.missing_count(), 0);
            for (a, b) in d.records().iter().zip(out.records()) {
                for (x, y) in a.covariates.iter().zip(&b.covariates) {
                    if x.is_some() { prop_assert_eq!(x, y); }
                }
            }
            prop_assert_eq!(impute_knn(&out, 5).unwrap(), out);
        }
    }
}
