//! Experiment protocols: repeated random train/test splits, training-size
//! sweeps on real data and dimensionality sweeps on synthetic data, plus
//! CSV/JSON reporting.
//!
//! Every run draws its own random stream from the base seed and the run's
//! coordinates, so runs can execute in parallel and results are always
//! reported in run order.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::concordance::{concordance_index, has_comparable_pair, ConcordanceError};
use crate::data::{impute_knn, DataError, SurvivalDataset};
use crate::model::{train, ModelError, SmoothRankConfig};
use crate::seeding::derive_rng;
use crate::synthetic::{generate, replicate_seed, SyntheticConfig, SyntheticError};

/// Upper bound on redraws of a single split before giving up.
pub const MAX_REDRAWS: usize = 1000;

const SPLITS_STREAM: u64 = 1;
const SIZE_TEST_STREAM: u64 = 2;
const SIZE_TRAIN_STREAM: u64 = 3;
const DIM_STREAM: u64 = 4;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Synthetic(#[from] SyntheticError),
    #[error(transparent)]
    Concordance(#[from] ConcordanceError),
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("run {0}: no split with comparable pairs on both sides after {MAX_REDRAWS} draws")]
    DegenerateSplits(usize),
    #[error("report is empty")]
    EmptyReport,
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Imputation {
    #[default]
    None,
    Knn(usize),
}

impl FromStr for Imputation {
    type Err = String;

    /// `none`, or `knn<k>` such as `knn5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "none" {
            return Ok(Self::None);
        }
        s.strip_prefix("knn")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k > 0)
            .map(Self::Knn)
            .ok_or_else(|| format!("unknown imputation '{s}' (expected 'none' or 'knn<k>')"))
    }
}

impl Imputation {
    pub fn apply(&self, data: &SurvivalDataset) -> Result<SurvivalDataset, DataError> {
        match *self {
            Self::None => Ok(data.clone()),
            Self::Knn(k) => impute_knn(data, k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train_fraction: f64,
    pub n_splits: usize,
    pub seed: u64,
}

impl Default for SplitPlan {
    fn default() -> Self {
        Self {
            train_fraction: 2.0 / 3.0,
            n_splits: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRun {
    pub split_index: usize,
    pub ci: f64,
    pub surviving_features: usize,
    pub redraws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub runs: Vec<SplitRun>,
    pub mean_ci: f64,
    pub surviving_features_mean: f64,
    pub redraws: usize,
    pub config_echo: Value,
}

impl ExperimentResult {
    pub fn per_run_ci(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.ci).collect()
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

fn dataset_echo(data: &SurvivalDataset) -> Value {
    json!({
        "n_records": data.len(),
        "n_features": data.n_features(),
        "n_events": data.records().iter().filter(|r| r.event).count(),
        "n_missing": data.missing_count(),
        "feature_names": data.feature_names(),
    })
}

struct Evaluated {
    ci: f64,
    surviving: usize,
}

fn fit_and_evaluate(
    train_set: &SurvivalDataset,
    test_set: &SurvivalDataset,
    config: &SmoothRankConfig,
) -> Result<Evaluated, ExperimentError> {
    let model = train(train_set, config)?;
    let scores = model.score_dataset(test_set)?;
    let ci = concordance_index(&scores, &test_set.targets())?;
    Ok(Evaluated {
        ci,
        surviving: model.surviving(),
    })
}

fn both_comparable(data: &SurvivalDataset, a: &[usize], b: &[usize]) -> bool {
    let targets = |idx: &[usize]| -> Vec<(f64, bool)> {
        idx.iter()
            .map(|&i| (data.records()[i].time, data.records()[i].event))
            .collect()
    };
    has_comparable_pair(&targets(a)) && has_comparable_pair(&targets(b))
}

/// Train on a random `train_fraction` of the records and evaluate on the
/// rest, `n_splits` times.
pub fn run_random_splits(
    data: &SurvivalDataset,
    plan: &SplitPlan,
    config: &SmoothRankConfig,
) -> Result<ExperimentResult, ExperimentError> {
    if !(plan.train_fraction > 0.0 && plan.train_fraction < 1.0) || plan.n_splits == 0 {
        return Err(ExperimentError::Config(
            "train_fraction must lie in (0, 1) and n_splits must be positive".into(),
        ));
    }
    let n = data.len();
    let n_train = (plan.train_fraction * n as f64).round() as usize;
    if n_train < 2 || n - n_train < 2 {
        return Err(ExperimentError::Config(format!(
            "{n} records cannot be split at fraction {}",
            plan.train_fraction
        )));
    }

    let runs = (0..plan.n_splits)
        .into_par_iter()
        .map(|split| {
            let mut idx: Vec<usize> = (0..n).collect();
            for attempt in 0..MAX_REDRAWS {
                let mut rng = derive_rng(plan.seed, &[SPLITS_STREAM, split as u64, attempt as u64]);
                idx.sort_unstable();
                idx.shuffle(&mut rng);
                let (tr, te) = idx.split_at(n_train);
                if !both_comparable(data, tr, te) {
                    continue;
                }
                let e = fit_and_evaluate(&data.subset(tr)?, &data.subset(te)?, config)?;
                return Ok(SplitRun {
                    split_index: split,
                    ci: e.ci,
                    surviving_features: e.surviving,
                    redraws: attempt,
                });
            }
            Err(ExperimentError::DegenerateSplits(split))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let cis: Vec<f64> = runs.iter().map(|r| r.ci).collect();
    let surviving: Vec<f64> = runs.iter().map(|r| r.surviving_features as f64).collect();
    let redraws = runs.iter().map(|r| r.redraws).sum();
    if redraws > 0 {
        log::info!("{redraws} degenerate splits were redrawn");
    }
    Ok(ExperimentResult {
        mean_ci: mean(&cis),
        surviving_features_mean: mean(&surviving),
        redraws,
        config_echo: json!({
            "protocol": "random_splits",
            "plan": plan,
            "model": config,
            "dataset": dataset_echo(data),
        }),
        runs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Training-set size or feature count.
    pub key: usize,
    pub mean_ci: f64,
    pub sd_ci: f64,
    pub n_models: usize,
    pub surviving_features_mean: f64,
}

impl SweepRow {
    fn from_runs(key: usize, runs: &[Evaluated]) -> Self {
        let cis: Vec<f64> = runs.iter().map(|r| r.ci).collect();
        let surv: Vec<f64> = runs.iter().map(|r| r.surviving as f64).collect();
        Self {
            key,
            mean_ci: mean(&cis),
            sd_ci: sd(&cis),
            n_models: runs.len(),
            surviving_features_mean: mean(&surv),
        }
    }

    pub fn standard_error(&self) -> f64 {
        self.sd_ci / (self.n_models as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    /// `size` or `m`.
    pub key_name: String,
    pub rows: Vec<SweepRow>,
    pub redraws: usize,
    pub config_echo: Value,
}

impl SweepTable {
    pub fn row(&self, key: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.key == key)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSweepPlan {
    pub sizes: Vec<usize>,
    pub draws_per_size: usize,
    pub outer_reps: usize,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SizeSweepPlan {
    pub fn new(sizes: Vec<usize>, seed: u64) -> Self {
        Self {
            sizes,
            draws_per_size: 20,
            outer_reps: 10,
            test_fraction: 0.2,
            seed,
        }
    }
}

/// Fixed held-out test set per outer repetition; training sets of each size
/// drawn from the remaining records.
pub fn run_size_sweep(
    data: &SurvivalDataset,
    plan: &SizeSweepPlan,
    config: &SmoothRankConfig,
) -> Result<SweepTable, ExperimentError> {
    let n = data.len();
    if plan.sizes.is_empty() || plan.draws_per_size == 0 || plan.outer_reps == 0 {
        return Err(ExperimentError::Config(
            "sizes, draws and repetitions must be non-empty".into(),
        ));
    }
    if !(plan.test_fraction > 0.0 && plan.test_fraction < 1.0) {
        return Err(ExperimentError::Config(
            "test_fraction must lie in (0, 1)".into(),
        ));
    }
    let n_test = (plan.test_fraction * n as f64).round() as usize;
    let pool = n - n_test;
    if let Some(&too_big) = plan.sizes.iter().find(|&&s| s > pool || s < 2) {
        return Err(ExperimentError::Config(format!(
            "training size {too_big} must lie in [2, {pool}] with {n_test} test records held out"
        )));
    }

    // Test partitions, one per outer repetition.
    let partitions = (0..plan.outer_reps)
        .map(|rep| {
            let mut idx: Vec<usize> = (0..n).collect();
            for attempt in 0..MAX_REDRAWS {
                let mut rng =
                    derive_rng(plan.seed, &[SIZE_TEST_STREAM, rep as u64, attempt as u64]);
                idx.sort_unstable();
                idx.shuffle(&mut rng);
                let (te, rest) = idx.split_at(n_test);
                if both_comparable(data, te, rest) {
                    return Ok((te.to_vec(), rest.to_vec(), attempt));
                }
            }
            Err(ExperimentError::DegenerateSplits(rep))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let jobs: Vec<(usize, usize, usize)> = (0..plan.outer_reps)
        .flat_map(|r| {
            (0..plan.sizes.len())
                .flat_map(move |s| (0..plan.draws_per_size).map(move |d| (r, s, d)))
        })
        .collect();

    let results = jobs
        .par_iter()
        .map(|&(rep, s, draw)| {
            let (test_idx, rest, _) = &partitions[rep];
            let size = plan.sizes[s];
            let mut pool = rest.clone();
            for attempt in 0..MAX_REDRAWS {
                let mut rng = derive_rng(
                    plan.seed,
                    &[
                        SIZE_TRAIN_STREAM,
                        rep as u64,
                        s as u64,
                        draw as u64,
                        attempt as u64,
                    ],
                );
                pool.copy_from_slice(rest);
                let (chosen, _) = pool.partial_shuffle(&mut rng, size);
                if !both_comparable(data, chosen, test_idx) {
                    continue;
                }
                let e = fit_and_evaluate(&data.subset(chosen)?, &data.subset(test_idx)?, config)?;
                return Ok((s, e, attempt));
            }
            Err(ExperimentError::DegenerateSplits(rep))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let mut redraws: usize = partitions.iter().map(|p| p.2).sum();
    let mut grouped: Vec<Vec<Evaluated>> = plan.sizes.iter().map(|_| Vec::new()).collect();
    for (s, e, attempt) in results {
        redraws += attempt;
        grouped[s].push(e);
    }
    let rows = plan
        .sizes
        .iter()
        .zip(&grouped)
        .map(|(&size, runs)| SweepRow::from_runs(size, runs))
        .collect();

    Ok(SweepTable {
        key_name: "size".into(),
        rows,
        redraws,
        config_echo: json!({
            "protocol": "size_sweep",
            "plan": plan,
            "model": config,
            "dataset": dataset_echo(data),
        }),
    })
}

/// For each feature count, generate `replicates` synthetic datasets, train on
/// a random half and evaluate on the other half.
pub fn run_dimensionality_sweep(
    base: &SyntheticConfig,
    counts: &[usize],
    replicates: usize,
    config: &SmoothRankConfig,
) -> Result<SweepTable, ExperimentError> {
    if counts.is_empty() || replicates == 0 {
        return Err(ExperimentError::Config(
            "counts and replicates must be non-empty".into(),
        ));
    }
    base.validate()?;
    let n = base.n_records;
    let n_train = n / 2;

    let jobs: Vec<(usize, usize)> = (0..counts.len())
        .flat_map(|c| (0..replicates).map(move |r| (c, r)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(c, rep)| {
            let m = counts[c];
            let seed = replicate_seed(base.seed, m, rep);
            let data = generate(&SyntheticConfig {
                n_features: m,
                seed,
                ..*base
            })?;
            let mut idx: Vec<usize> = (0..n).collect();
            for attempt in 0..MAX_REDRAWS {
                let mut rng = derive_rng(seed, &[DIM_STREAM, attempt as u64]);
                idx.sort_unstable();
                idx.shuffle(&mut rng);
                let (tr, te) = idx.split_at(n_train);
                if !both_comparable(&data, tr, te) {
                    continue;
                }
                let e = fit_and_evaluate(&data.subset(tr)?, &data.subset(te)?, config)?;
                return Ok((c, e, attempt));
            }
            Err(ExperimentError::DegenerateSplits(rep))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let mut redraws = 0;
    let mut grouped: Vec<Vec<Evaluated>> = counts.iter().map(|_| Vec::new()).collect();
    for (c, e, attempt) in results {
        redraws += attempt;
        grouped[c].push(e);
    }
    Ok(SweepTable {
        key_name: "m".into(),
        rows: counts
            .iter()
            .zip(&grouped)
            .map(|(&m, runs)| SweepRow::from_runs(m, runs))
            .collect(),
        redraws,
        config_echo: json!({
            "protocol": "dimensionality_sweep",
            "synthetic": base,
            "feature_counts": counts,
            "replicates": replicates,
            "model": config,
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Splits(ExperimentResult),
    Sweep(SweepTable),
}

/// Formats `x` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0".into()
        } else {
            x.to_string()
        };
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.999995 -> 10.00000).
    let digits = s.chars().filter(char::is_ascii_digit).count();
    let leading_zeros = s
        .trim_start_matches('-')
        .chars()
        .take_while(|&c| c == '0' || c == '.')
        .filter(|&c| c == '0')
        .count();
    if digits - leading_zeros > 6 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

fn sig6_value(x: f64) -> Value {
    sig6(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

impl Report {
    pub fn render(&self, format: ReportFormat) -> Result<String, ExperimentError> {
        match (self, format) {
            (Self::Splits(r), _) if r.runs.is_empty() => Err(ExperimentError::EmptyReport),
            (Self::Sweep(t), _) if t.rows.is_empty() => Err(ExperimentError::EmptyReport),
            (Self::Splits(r), ReportFormat::Csv) => {
                let mut out = String::from("split_index,ci,surviving_features\n");
                for run in &r.runs {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        run.split_index,
                        sig6(run.ci),
                        run.surviving_features
                    );
                }
                Ok(out)
            }
            (Self::Sweep(t), ReportFormat::Csv) => {
                let mut out = format!("{},mean_ci,sd_ci,n_models\n", t.key_name);
                for row in &t.rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        row.key,
                        sig6(row.mean_ci),
                        sig6(row.sd_ci),
                        row.n_models
                    );
                }
                Ok(out)
            }
            (Self::Splits(r), ReportFormat::Json) => {
                let runs: Vec<Value> = r
                    .runs
                    .iter()
                    .map(|run| {
                        json!({
                            "split_index": run.split_index,
                            "ci": sig6_value(run.ci),
                            "surviving_features": run.surviving_features,
                        })
                    })
                    .collect();
                let v = json!({
                    "runs": runs,
                    "mean_ci": sig6_value(r.mean_ci),
                    "surviving_features_mean": sig6_value(r.surviving_features_mean),
                    "redraws": r.redraws,
                    "config_echo": r.config_echo,
                });
                Ok(serde_json::to_string_pretty(&v).expect("json values serialize") + "\n")
            }
            (Self::Sweep(t), ReportFormat::Json) => {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|row| {
                        json!({
                            t.key_name.clone(): row.key,
                            "mean_ci": sig6_value(row.mean_ci),
                            "sd_ci": sig6_value(row.sd_ci),
                            "n_models": row.n_models,
                            "surviving_features_mean": sig6_value(row.surviving_features_mean),
                        })
                    })
                    .collect();
                let v = json!({
                    "rows": rows,
                    "redraws": t.redraws,
                    "config_echo": t.config_echo,
                });
                Ok(serde_json::to_string_pretty(&v).expect("json values serialize") + "\n")
            }
        }
    }
}

pub fn emit_report(
    report: &Report,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<(), ExperimentError> {
    let text = report.render(format)?;
    std::fs::write(path, text)?;
    Ok(())
}
