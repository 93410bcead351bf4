//! Harrell's concordance index and its two-class special case.
//!
//! Scores are risk scores: a higher score predicts an earlier failure. A
//! comparable pair `(i, j)` has an observed event for `i` and `t_i < t_j`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConcordanceError {
    #[error("scores and targets differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no comparable pairs")]
    NoComparablePairs,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcordanceCounts {
    pub concordant: u64,
    pub discordant: u64,
    pub ties: u64,
    pub comparable: u64,
}

impl ConcordanceCounts {
    /// `(CP + 0.5·Ties) / (CP + DP + Ties)`; `None` without comparable pairs.
    pub fn index(&self) -> Option<f64> {
        (self.comparable > 0)
            .then(|| (self.concordant as f64 + 0.5 * self.ties as f64) / self.comparable as f64)
    }

    fn add(&mut self, earlier: f64, later: f64) {
        self.comparable += 1;
        if earlier > later {
            self.concordant += 1;
        } else if earlier < later {
            self.discordant += 1;
        } else {
            self.ties += 1;
        }
    }
}

/// All ordered pairs `(i, j)` with `event_i` and `t_i < t_j`.
pub fn comparable_pairs(targets: &[(f64, bool)]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, &(ti, ei)) in targets.iter().enumerate() {
        if !ei {
            continue;
        }
        for (j, &(tj, _)) in targets.iter().enumerate() {
            if ti < tj {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

pub fn has_comparable_pair(targets: &[(f64, bool)]) -> bool {
    let Some(first_event) = targets
        .iter()
        .filter(|t| t.1)
        .map(|t| t.0)
        .min_by(f64::total_cmp)
    else {
        return false;
    };
    targets.iter().any(|t| t.0 > first_event)
}

pub fn concordance_counts(
    scores: &[f64],
    targets: &[(f64, bool)],
) -> Result<ConcordanceCounts, ConcordanceError> {
    if scores.len() != targets.len() {
        return Err(ConcordanceError::LengthMismatch(
            scores.len(),
            targets.len(),
        ));
    }
    let mut counts = ConcordanceCounts::default();
    for (i, &(ti, ei)) in targets.iter().enumerate() {
        if !ei {
            continue;
        }
        for (j, &(tj, _)) in targets.iter().enumerate() {
            if ti < tj {
                counts.add(scores[i], scores[j]);
            }
        }
    }
    Ok(counts)
}

pub fn concordance_index(scores: &[f64], targets: &[(f64, bool)]) -> Result<f64, ConcordanceError> {
    concordance_counts(scores, targets)?
        .index()
        .ok_or(ConcordanceError::NoComparablePairs)
}

/// Two-class concordance: fraction of (positive, negative) pairs where the
/// positive scores higher, ties counted half. Equals the area under the ROC
/// curve.
pub fn binary_concordance(positive: &[f64], negative: &[f64]) -> Option<f64> {
    if positive.is_empty() || negative.is_empty() {
        return None;
    }
    let mut counts = ConcordanceCounts::default();
    for &p in positive {
        for &q in negative {
            counts.add(p, q);
        }
    }
    counts.index()
}

/// Area under the ROC curve from mid-ranks (Mann–Whitney U).
pub fn auc_rank(positive: &[f64], negative: &[f64]) -> Option<f64> {
    if positive.is_empty() || negative.is_empty() {
        return None;
    }
    let mut all: Vec<(f64, bool)> = positive
        .iter()
        .map(|&s| (s, true))
        .chain(negative.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // Ranks i+1..=j share their mean.
        let mid = (i + 1 + j) as f64 / 2.0;
        rank_sum += mid * all[i..j].iter().filter(|e| e.1).count() as f64;
        i = j;
    }
    let (np, nn) = (positive.len() as f64, negative.len() as f64);
    Some((rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}
