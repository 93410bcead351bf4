//! Artificial censored data where every feature is a noisy copy of a latent
//! risk variable.
//!
//! Per record: `risk = ln(v)` with `v` a positive draw from a normal
//! distribution; the event time is `t = risk + q` and each feature is
//! `f = risk + q_m`, with every `q` drawn independently and uniformly from
//! `[min(risk)/2, max(risk)/2]`. A fixed fraction of records is censored at
//! `t · z`, `z ~ U[0.2, 0.8]`.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataError, SurvivalDataset, SurvivalRecord};
use crate::seeding::{derive_rng, derive_seed};

const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SyntheticError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("risk source never produced a positive draw in {MAX_REDRAWS} attempts")]
    NoPositiveDraw,
    #[error("configuration cannot produce a positive event time for record {0}")]
    NonPositiveTimes(usize),
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_records: usize,
    pub n_features: usize,
    pub censoring_fraction: f64,
    pub seed: u64,
    pub risk_source_mean: f64,
    pub risk_source_sd: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_records: 400,
            n_features: 5,
            censoring_fraction: 0.5,
            seed: 0,
            risk_source_mean: 10.0,
            risk_source_sd: 2.0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<(), SyntheticError> {
        let bad = |m: &str| Err(SyntheticError::Config(m.into()));
        if self.n_records < 4 {
            return bad("n_records must be at least 4");
        }
        if self.n_features < 1 {
            return bad("n_features must be at least 1");
        }
        if !(0.0..1.0).contains(&self.censoring_fraction) {
            return bad("censoring_fraction must lie in [0, 1)");
        }
        if !self.risk_source_mean.is_finite()
            || !(self.risk_source_sd >= 0.0)
            || !self.risk_source_sd.is_finite()
        {
            return bad("risk source needs a finite mean and a finite non-negative sd");
        }
        Ok(())
    }
}

/// A generated dataset with the latent quantities behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDraw {
    pub dataset: SurvivalDataset,
    pub risk: Vec<f64>,
    /// Latent event time of every record, censored or not.
    pub event_time: Vec<f64>,
}

fn uniform(lo: f64, hi: f64) -> Uniform<f64> {
    // `lo == hi` only when every risk is equal; the interval is then a point.
    Uniform::new_inclusive(lo, hi).expect("finite ordered bounds")
}

pub fn generate_with_latent(config: &SyntheticConfig) -> Result<SyntheticDraw, SyntheticError> {
    config.validate()?;
    let mut rng: ChaCha8Rng = derive_rng(config.seed, &[]);
    let n = config.n_records;

    let source = Normal::new(config.risk_source_mean, config.risk_source_sd)
        .map_err(|e| SyntheticError::Config(e.to_string()))?;
    let risk = (0..n)
        .map(|_| {
            (0..MAX_REDRAWS)
                .map(|_| source.sample(&mut rng))
                .find(|&v| v > 0.0)
                .map(f64::ln)
                .ok_or(SyntheticError::NoPositiveDraw)
        })
        .collect::<Result<Vec<f64>, _>>()?;

    let (min, max) = risk
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| {
            (a.min(r), b.max(r))
        });
    let noise = uniform(min / 2.0, max / 2.0);

    let mut event_time = Vec::with_capacity(n);
    for (i, &r) in risk.iter().enumerate() {
        if r + max / 2.0 <= 0.0 {
            return Err(SyntheticError::NonPositiveTimes(i));
        }
        let t = (0..MAX_REDRAWS)
            .map(|_| r + noise.sample(&mut rng))
            .find(|&t| t > 0.0)
            .ok_or(SyntheticError::NonPositiveTimes(i))?;
        event_time.push(t);
    }

    let features: Vec<Vec<Option<f64>>> = risk
        .iter()
        .map(|&r| {
            (0..config.n_features)
                .map(|_| Some(r + noise.sample(&mut rng)))
                .collect()
        })
        .collect();

    let n_censored = (config.censoring_fraction * n as f64).round() as usize;
    let mut censored = vec![false; n];
    for i in sample_indices(&mut rng, n, n_censored) {
        censored[i] = true;
    }
    let shrink = uniform(0.2, 0.8);

    let records = features
        .into_iter()
        .zip(&event_time)
        .zip(&censored)
        .map(|((covariates, &t), &c)| {
            if c {
                SurvivalRecord::new(covariates, t * rng.sample(shrink), false)
            } else {
                SurvivalRecord::new(covariates, t, true)
            }
        })
        .collect();

    let names = (1..=config.n_features).map(|m| format!("f{m}")).collect();
    Ok(SyntheticDraw {
        dataset: SurvivalDataset::new(records, names)?,
        risk,
        event_time,
    })
}

pub fn generate(config: &SyntheticConfig) -> Result<SurvivalDataset, SyntheticError> {
    Ok(generate_with_latent(config)?.dataset)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticReplicate {
    pub n_features: usize,
    pub replicate: usize,
    pub seed: u64,
    pub dataset: SurvivalDataset,
}

/// Seed of replicate `replicate` at dimension `n_features`.
pub fn replicate_seed(base_seed: u64, n_features: usize, replicate: usize) -> u64 {
    derive_seed(base_seed, &[n_features as u64, replicate as u64])
}

/// `replicates` independent datasets for every feature count, each seeded
/// from `(base.seed, M, replicate)`.
pub fn sweep_feature_counts(
    base: &SyntheticConfig,
    counts: &[usize],
    replicates: usize,
) -> Result<Vec<SyntheticReplicate>, SyntheticError> {
    let mut out = Vec::with_capacity(counts.len() * replicates);
    for &m in counts {
        for r in 0..replicates {
            let seed = replicate_seed(base.seed, m, r);
            let cfg = SyntheticConfig {
                n_features: m,
                seed,
                ..*base
            };
            out.push(SyntheticReplicate {
                n_features: m,
                replicate: r,
                seed,
                dataset: generate(&cfg)?,
            });
        }
    }
    Ok(out)
}

/// Multiples of 5 from 5 to 75.
pub fn default_feature_counts() -> Vec<usize> {
    (1..=15).map(|k| 5 * k).collect()
}
