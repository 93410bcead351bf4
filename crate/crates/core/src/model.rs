//! The Smooth Rank ensemble: per-feature marginal predictors built from the
//! contrast of two class densities, weighted by their two-class concordance
//! and aggregated into a risk score.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concordance::auc_rank;
use crate::data::{
    binarize, select_threshold, BinarizationSpec, BinarySample, ClassLabel, DataError,
    SurvivalDataset,
};
use crate::density::{
    class_bandwidths, estimate_density, make_grid, sample_sd, DensityEstimate, EvaluationGrid,
    DEFAULT_GRID_POINTS,
};
use crate::loess::{loess_fit, LoessFit, DEFAULT_SPAN};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("binarization failed: {0}")]
    Binarization(#[from] DataError),
    #[error("every feature was dropped; nothing to train")]
    AllDropped,
    #[error("class densities are on different grids")]
    GridMismatch,
    #[error("mixture density is below the cutoff at every grid point")]
    AllMasked,
    #[error("covariate vector has {found} entries, model expects {expected}")]
    Dimension { found: usize, expected: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Units in which the low-density cutoff is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CutoffUnits {
    /// Mixture density multiplied by the feature's standard deviation, i.e.
    /// the density of the standardized feature. Invariant to rescaling.
    #[default]
    Standardized,
    /// Mixture density in the feature's own units.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothRankConfig {
    pub grid_points: usize,
    pub density_cutoff: f64,
    pub cutoff_units: CutoffUnits,
    pub span: f64,
    pub min_class_samples: usize,
}

impl Default for SmoothRankConfig {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            density_cutoff: 0.1,
            cutoff_units: CutoffUnits::Standardized,
            span: DEFAULT_SPAN,
            min_class_samples: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassPriors {
    pub pi1: f64,
    pub pi2: f64,
}

impl ClassPriors {
    pub fn from_counts(class1: usize, class2: usize) -> Self {
        let pi1 = class1 as f64 / (class1 + class2) as f64;
        Self {
            pi1,
            pi2: 1.0 - pi1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalPredictor {
    pub feature_index: usize,
    pub grid: EvaluationGrid,
    pub priors: ClassPriors,
    /// Density contrast at each grid point; `None` where the mixture density
    /// falls below the cutoff.
    pub q_raw: Vec<Option<f64>>,
    pub q_smooth: LoessFit,
    /// Two-class concordance of the predictor minus 0.5.
    pub raw_weight: f64,
    /// Weight after shrinkage.
    pub weight: f64,
}

impl MarginalPredictor {
    pub fn predict(&self, x: f64) -> f64 {
        self.q_smooth.predict(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum DropReason {
    TooFewSamples { class1: usize, class2: usize },
    Degenerate { detail: String },
    AllMasked,
    TooFewUnmasked { unmasked: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedFeature {
    pub feature_index: usize,
    pub reason: DropReason,
}

/// The raw density contrast `(g1 - g2) / (π1·g1 + π2·g2)` on the shared grid,
/// masked where the mixture density is below `cutoff`.
pub fn build_q_raw(
    g1: &DensityEstimate,
    g2: &DensityEstimate,
    priors: ClassPriors,
    cutoff: f64,
) -> Result<Vec<Option<f64>>, ModelError> {
    if g1.grid != g2.grid {
        return Err(ModelError::GridMismatch);
    }
    let q: Vec<Option<f64>> = g1
        .values
        .iter()
        .zip(&g2.values)
        .map(|(&a, &b)| {
            let mixture = priors.pi1 * a + priors.pi2 * b;
            (mixture >= cutoff && mixture > 0.0).then(|| (a - b) / mixture)
        })
        .collect();
    if q.iter().all(Option::is_none) {
        return Err(ModelError::AllMasked);
    }
    Ok(q)
}

fn class_values(samples: &[BinarySample], feature: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for s in samples {
        if let Some(v) = s.covariates[feature] {
            match s.class_label {
                ClassLabel::Class1 => c1.push(v),
                ClassLabel::Class2 => c2.push(v),
            }
        }
    }
    (c1, c2)
}

/// Builds the smoothed marginal predictor for one feature. The weight is
/// left at zero.
pub fn build_predictor(
    samples: &[BinarySample],
    feature_index: usize,
    config: &SmoothRankConfig,
) -> Result<MarginalPredictor, DropReason> {
    let (c1, c2) = class_values(samples, feature_index);
    if c1.len() < config.min_class_samples || c2.len() < config.min_class_samples {
        return Err(DropReason::TooFewSamples {
            class1: c1.len(),
            class2: c2.len(),
        });
    }
    let degenerate = |e: &dyn std::fmt::Display| DropReason::Degenerate {
        detail: e.to_string(),
    };

    let (h1, h2) = class_bandwidths(&c1, &c2).map_err(|e| degenerate(&e))?;
    let grid = make_grid(&c1, &c2, h1.max(h2), config.grid_points).map_err(|e| degenerate(&e))?;
    let g1 = estimate_density(&c1, &grid, h1).map_err(|e| degenerate(&e))?;
    let g2 = estimate_density(&c2, &grid, h2).map_err(|e| degenerate(&e))?;
    let priors = ClassPriors::from_counts(c1.len(), c2.len());

    let cutoff = match config.cutoff_units {
        CutoffUnits::Raw => config.density_cutoff,
        CutoffUnits::Standardized => {
            let all: Vec<f64> = c1.iter().chain(&c2).copied().collect();
            config.density_cutoff / sample_sd(&all)
        }
    };
    let q_raw = build_q_raw(&g1, &g2, priors, cutoff).map_err(|_| DropReason::AllMasked)?;

    let (xs, ys): (Vec<f64>, Vec<f64>) = grid
        .points()
        .iter()
        .zip(&q_raw)
        .filter_map(|(&x, q)| q.map(|q| (x, q)))
        .unzip();
    let q_smooth = loess_fit(&xs, &ys, config.span)
        .map_err(|_| DropReason::TooFewUnmasked { unmasked: xs.len() })?;

    Ok(MarginalPredictor {
        feature_index,
        grid,
        priors,
        q_raw,
        q_smooth,
        raw_weight: 0.0,
        weight: 0.0,
    })
}

/// Two-class concordance of the predictor's outputs, Class1 ranked higher,
/// minus 0.5. Samples missing the feature are ignored.
pub fn predictor_weight(predictor: &MarginalPredictor, samples: &[BinarySample]) -> f64 {
    let (c1, c2) = class_values(samples, predictor.feature_index);
    let s1: Vec<f64> = c1.iter().map(|&v| predictor.predict(v)).collect();
    let s2: Vec<f64> = c2.iter().map(|&v| predictor.predict(v)).collect();
    auc_rank(&s1, &s2).map_or(0.0, |auc| auc - 0.5)
}

/// Shrinks every weight towards zero by a third of the largest weight;
/// weights at or below that third are zeroed.
pub fn shrink_weights(weights: &[f64]) -> Vec<f64> {
    let mu = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(mu > 0.0) {
        return vec![0.0; weights.len()];
    }
    let cut = mu / 3.0;
    weights
        .iter()
        .map(|&w| if w > cut { w - cut } else { 0.0 })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothRankModel {
    pub feature_names: Vec<String>,
    pub threshold_spec: BinarizationSpec,
    pub class_sizes: (usize, usize),
    /// Largest weight before shrinkage.
    pub shrinkage_mu: f64,
    pub config: SmoothRankConfig,
    pub predictors: Vec<MarginalPredictor>,
    pub dropped: Vec<DroppedFeature>,
    pub warnings: Vec<String>,
}

impl SmoothRankModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Predictors with a positive weight after shrinkage.
    pub fn surviving(&self) -> usize {
        self.predictors.iter().filter(|p| p.weight > 0.0).count()
    }

    /// Weight of every input feature, zero for dropped ones.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_features()];
        for p in &self.predictors {
            w[p.feature_index] = p.weight;
        }
        w
    }

    /// Risk score and the number of features that contributed to it.
    pub fn score_detailed(&self, covariates: &[Option<f64>]) -> Result<(f64, usize), ModelError> {
        if covariates.len() != self.n_features() {
            return Err(ModelError::Dimension {
                found: covariates.len(),
                expected: self.n_features(),
            });
        }
        let mut num = 0.0;
        let mut den = 0.0;
        let mut active = 0;
        for p in self.predictors.iter().filter(|p| p.weight > 0.0) {
            if let Some(x) = covariates[p.feature_index].filter(|x| x.is_finite()) {
                num += p.weight * p.predict(x);
                den += p.weight;
                active += 1;
            }
        }
        if active == 0 {
            return Ok((0.0, 0));
        }
        Ok((num / den, active))
    }

    /// Weighted mean of the active marginal predictors; higher means an
    /// earlier expected failure. Returns 0 when no feature is active.
    pub fn score(&self, covariates: &[Option<f64>]) -> Result<f64, ModelError> {
        let (s, active) = self.score_detailed(covariates)?;
        if active == 0 {
            log::warn!("no active predictor for this record; scoring 0");
        }
        Ok(s)
    }

    pub fn score_dataset(&self, data: &SurvivalDataset) -> Result<Vec<f64>, ModelError> {
        data.records()
            .iter()
            .map(|r| self.score(&r.covariates))
            .collect()
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Threshold selection, binarization, one predictor per feature, weighting
/// and shrinkage.
pub fn train(
    data: &SurvivalDataset,
    config: &SmoothRankConfig,
) -> Result<SmoothRankModel, ModelError> {
    let spec = select_threshold(data)?;
    let samples = binarize(data, spec)?;
    let class1 = samples
        .iter()
        .filter(|s| s.class_label == ClassLabel::Class1)
        .count();
    let class_sizes = (class1, samples.len() - class1);

    let built: Vec<Result<MarginalPredictor, DroppedFeature>> = (0..data.n_features())
        .into_par_iter()
        .map(|f| {
            build_predictor(&samples, f, config)
                .map(|mut p| {
                    p.raw_weight = predictor_weight(&p, &samples);
                    p
                })
                .map_err(|reason| DroppedFeature {
                    feature_index: f,
                    reason,
                })
        })
        .collect();

    let mut predictors = Vec::new();
    let mut dropped = Vec::new();
    for b in built {
        match b {
            Ok(p) => predictors.push(p),
            Err(d) => dropped.push(d),
        }
    }
    if predictors.is_empty() {
        return Err(ModelError::AllDropped);
    }

    let raw: Vec<f64> = predictors.iter().map(|p| p.raw_weight).collect();
    let shrunk = shrink_weights(&raw);
    for (p, w) in predictors.iter_mut().zip(shrunk) {
        p.weight = w;
    }
    let shrinkage_mu = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut warnings = Vec::new();
    for d in &dropped {
        warnings.push(format!(
            "feature '{}' dropped: {:?}",
            data.feature_names()[d.feature_index],
            d.reason
        ));
    }
    if predictors.iter().all(|p| p.weight == 0.0) {
        warnings.push("all weights are zero after shrinkage; every score will be 0".into());
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    Ok(SmoothRankModel {
        feature_names: data.feature_names().to_vec(),
        threshold_spec: spec,
        class_sizes,
        shrinkage_mu,
        config: *config,
        predictors,
        dropped,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concordance::binary_concordance;
    use crate::data::SurvivalRecord;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::Normal;

    fn estimate_on(grid: &EvaluationGrid, values: Vec<f64>) -> DensityEstimate {
        DensityEstimate {
            grid: grid.clone(),
            values,
            bandwidth: 1.0,
        }
    }

    fn samples(c1: &[f64], c2: &[f64]) -> Vec<BinarySample> {
        c1.iter()
            .map(|&v| BinarySample {
                covariates: vec![Some(v)],
                class_label: ClassLabel::Class1,
            })
            .chain(c2.iter().map(|&v| BinarySample {
                covariates: vec![Some(v)],
                class_label: ClassLabel::Class2,
            }))
            .collect()
    }

    #[test]
    fn q_raw_cases() {
        let grid = EvaluationGrid::new(0.0, 1.0, 4).unwrap();
        let half = ClassPriors::from_counts(5, 5);

        let g = estimate_on(&grid, vec![0.5, 1.0, 2.0, 0.3]);
        let q = build_q_raw(&g, &g, half, 0.1).unwrap();
        assert!(q.iter().all(|v| *v == Some(0.0)));

        let g1 = estimate_on(&grid, vec![0.4, 1.0, 0.05, 2.0]);
        let g2 = estimate_on(&grid, vec![0.2, 0.5, 0.05, 1.0]);
        let q = build_q_raw(&g1, &g2, half, 0.1).unwrap();
        assert!((q[0].unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((q[1].unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(q[2], None, "mixture 0.05 < 0.1 must be masked");

        let low = estimate_on(&grid, vec![0.01; 4]);
        assert!(matches!(
            build_q_raw(&low, &low, half, 0.1),
            Err(ModelError::AllMasked)
        ));

        let other = EvaluationGrid::new(0.0, 2.0, 4).unwrap();
        assert!(matches!(
            build_q_raw(&g, &estimate_on(&other, vec![1.0; 4]), half, 0.1),
            Err(ModelError::GridMismatch)
        ));
    }

    #[test]
    fn shrinkage_examples() {
        let out = shrink_weights(&[0.30, 0.12, 0.05]);
        let want = [0.20, 0.02, 0.0];
        for (a, b) in out.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{out:?}");
        }
        let eq = shrink_weights(&[0.3; 4]);
        assert!(eq.iter().all(|w| (w - 0.2).abs() < 1e-15));
        assert_eq!(shrink_weights(&[-0.1, 0.0, -0.3]), vec![0.0; 3]);
    }

    fn normal_draws(rng: &mut ChaCha8Rng, mean: f64, n: usize) -> Vec<f64> {
        let d = Normal::new(mean, 1.0).unwrap();
        (0..n).map(|_| rng.sample(d)).collect()
    }

    #[test]
    fn identical_classes_give_flat_predictor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = SmoothRankConfig::default();
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let x = normal_draws(&mut rng, 0.0, 100);
            let p = build_predictor(&samples(&x, &x), 0, &cfg).unwrap();
            let m = p
                .q_smooth
                .fitted_y
                .iter()
                .fold(0.0f64, |a, v| a.max(v.abs()));
            worst = worst.max(m);
        }
        assert!(worst < 0.15, "max |q̃| = {worst}");
    }

    #[test]
    fn separated_classes_have_signed_predictor() {
        let c1: Vec<f64> = (0..20).map(|i| -10.0 - i as f64 * 0.1).collect();
        let c2: Vec<f64> = (0..20).map(|i| 10.0 + i as f64 * 0.1).collect();
        let s = samples(&c1, &c2);
        let p = build_predictor(&s, 0, &SmoothRankConfig::default()).unwrap();
        assert!(c1.iter().all(|&v| p.predict(v) > 0.0));
        assert!(c2.iter().all(|&v| p.predict(v) < 0.0));
        assert!((predictor_weight(&p, &s) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn feature_missing_in_class1_is_dropped() {
        let mut s = samples(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]);
        for x in s.iter_mut().filter(|x| x.class_label == ClassLabel::Class1) {
            x.covariates[0] = None;
        }
        assert_eq!(
            build_predictor(&s, 0, &SmoothRankConfig::default()),
            Err(DropReason::TooFewSamples {
                class1: 0,
                class2: 4
            })
        );
    }

    fn fake_predictor(fitted: Vec<f64>) -> MarginalPredictor {
        let n = fitted.len();
        let grid = EvaluationGrid::new(0.0, (n - 1) as f64, n).unwrap();
        MarginalPredictor {
            feature_index: 0,
            q_raw: fitted.iter().map(|&v| Some(v)).collect(),
            q_smooth: LoessFit {
                design_x: grid.points().to_vec(),
                fitted_y: fitted,
                span: 0.75,
                degree: 1,
                degenerate_windows: 0,
            },
            grid,
            priors: ClassPriors::from_counts(1, 1),
            raw_weight: 0.0,
            weight: 0.0,
        }
    }

    #[test]
    fn weight_extremes() {
        // q̃(x) = -x: Class1 at small x scores higher.
        let p = fake_predictor((0..10).map(|i| -(i as f64)).collect());
        let s = samples(&[0.0, 1.0, 2.0], &[5.0, 6.0, 7.0]);
        assert_eq!(predictor_weight(&p, &s), 0.5);
        let flat = fake_predictor(vec![0.2; 10]);
        assert_eq!(predictor_weight(&flat, &s), 0.0);
        let anti = samples(&[5.0, 6.0, 7.0], &[0.0, 1.0, 2.0]);
        assert_eq!(predictor_weight(&p, &anti), -0.5);
    }

    fn tiny_model(weights: &[f64], values: &[f64]) -> SmoothRankModel {
        let predictors = weights
            .iter()
            .zip(values)
            .enumerate()
            .map(|(i, (&w, &v))| {
                let mut p = fake_predictor(vec![v; 5]);
                p.feature_index = i;
                p.weight = w;
                p
            })
            .collect();
        SmoothRankModel {
            feature_names: (0..weights.len()).map(|i| format!("f{i}")).collect(),
            threshold_spec: BinarizationSpec { threshold: 1.0 },
            class_sizes: (1, 1),
            shrinkage_mu: 0.0,
            config: SmoothRankConfig::default(),
            predictors,
            dropped: Vec::new(),
            warnings: Vec::new(),
        }
    }

    #[test]
    fn score_cases() {
        let m = tiny_model(&[0.3, 0.2, 0.1], &[0.7, -0.4, 0.9]);
        assert!((m.score(&[None, Some(1.0), None]).unwrap() + 0.4).abs() < 1e-15);
        let m2 = tiny_model(&[0.1, 0.1], &[0.2, 0.6]);
        assert!((m2.score(&[Some(0.0), Some(3.0)]).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(m.score(&[None, None, None]).unwrap(), 0.0);
        assert!(matches!(
            m.score(&[None]),
            Err(ModelError::Dimension { .. })
        ));
    }

    #[test]
    fn score_ten_features_matches_weighted_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w: Vec<f64> = (0..10).map(|_| rng.random::<f64>()).collect();
        let v: Vec<f64> = (0..10).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let m = tiny_model(&w, &v);
        let x: Vec<Option<f64>> = (0..10).map(|i| Some(i as f64 * 0.3)).collect();
        let oracle = w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / w.iter().sum::<f64>();
        assert!((m.score(&x).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn posterior_identity_on_real_predictor() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c1 = normal_draws(&mut rng, 0.0, 40);
        let c2 = normal_draws(&mut rng, 1.0, 70);
        let (h1, h2) = class_bandwidths(&c1, &c2).unwrap();
        let grid = make_grid(&c1, &c2, h1.max(h2), 512).unwrap();
        let g1 = estimate_density(&c1, &grid, h1).unwrap();
        let g2 = estimate_density(&c2, &grid, h2).unwrap();
        let pr = ClassPriors::from_counts(40, 70);
        assert!((pr.pi1 + pr.pi2 - 1.0).abs() < 1e-12);
        let q = build_q_raw(&g1, &g2, pr, 0.1).unwrap();
        for ((q, &a), &b) in q.iter().zip(&g1.values).zip(&g2.values) {
            let Some(q) = q else { continue };
            let mix = pr.pi1 * a + pr.pi2 * b;
            let post1 = pr.pi1 * a / mix;
            let post2 = pr.pi2 * b / mix;
            assert!((q - (post1 / pr.pi1 - post2 / pr.pi2)).abs() < 1e-12);
            assert!(*q >= -1.0 / pr.pi2 - 1e-9 && *q <= 1.0 / pr.pi1 + 1e-9);
        }
    }

    fn dataset_with(features: Vec<Vec<Option<f64>>>, targets: &[(f64, bool)]) -> SurvivalDataset {
        let n_feat = features[0].len();
        let records = features
            .into_iter()
            .zip(targets)
            .map(|(c, &(t, e))| SurvivalRecord::new(c, t, e))
            .collect();
        SurvivalDataset::new(records, (0..n_feat).map(|i| format!("f{i}")).collect()).unwrap()
    }

    #[test]
    fn train_without_class_split_fails() {
        let d = dataset_with(
            vec![vec![Some(1.0)], vec![Some(2.0)], vec![Some(3.0)]],
            &[(5.0, true), (5.0, true), (1.0, false)],
        );
        assert!(matches!(
            train(&d, &SmoothRankConfig::default()),
            Err(ModelError::Binarization(DataError::NoValidThreshold))
        ));
    }

    #[test]
    fn model_json_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 80;
        let targets: Vec<(f64, bool)> = (0..n)
            .map(|_| (rng.random::<f64>() * 10.0 + 0.1, rng.random_bool(0.7)))
            .collect();
        let feats: Vec<Vec<Option<f64>>> = targets
            .iter()
            .map(|&(t, _)| {
                vec![
                    Some(t + rng.random::<f64>() * 3.0),
                    Some(rng.random::<f64>()),
                ]
            })
            .collect();
        let d = dataset_with(feats, &targets);
        let m = train(&d, &SmoothRankConfig::default()).unwrap();
        let back = SmoothRankModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        for r in d.records() {
            assert_eq!(
                m.score(&r.covariates).unwrap().to_bits(),
                back.score(&r.covariates).unwrap().to_bits()
            );
        }
    }

    proptest! {
        #[test]
        fn weight_is_pairwise_auc_minus_half(
            c1 in prop::collection::vec(-5.0f64..5.0, 4..60),
            c2 in prop::collection::vec(-4.0f64..6.0, 4..60),
        ) {
            let s = samples(&c1, &c2);
            if let Ok(p) = build_predictor(&s, 0, &SmoothRankConfig::default()) {
                let s1: Vec<f64> = c1.iter().map(|&v| p.predict(v)).collect();
                let s2: Vec<f64> = c2.iter().map(|&v| p.predict(v)).collect();
                let brute = binary_concordance(&s1, &s2).unwrap() - 0.5;
                prop_assert!((predictor_weight(&p, &s) - brute).abs() < 1e-12);
            }
        }

        #[test]
        fn shrunk_weights_nonnegative_and_order_preserving(w in prop::collection::vec(-0.5f64..0.5, 1..30)) {
            let s = shrink_weights(&w);
            prop_assert!(s.iter().all(|&x| x >= 0.0));
            for i in 0..w.len() {
                for j in 0..w.len() {
                    if w[i] >= w[j] { prop_assert!(s[i] >= s[j]); }
                }
            }
        }
    }
}
