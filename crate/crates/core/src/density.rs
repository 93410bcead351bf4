//! Univariate cosine-kernel density estimation on a fixed grid.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use thiserror::Error;

pub const DEFAULT_GRID_POINTS: usize = 512;
/// Grid extension past the sample range, in bandwidths.
pub const GRID_CUT: f64 = 3.0;

#[derive(Debug, Error, PartialEq)]
pub enum DensityError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("samples have zero spread; bandwidth undefined")]
    ZeroSpread,
    #[error("sample set is empty")]
    Empty,
    #[error("grid needs at least 2 points, got {0}")]
    GridTooSmall(usize),
    #[error("bandwidth must be positive and finite, got {0}")]
    BadBandwidth(f64),
}

/// Equally spaced evaluation points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationGrid {
    lo: f64,
    hi: f64,
    points: Vec<f64>,
}

impl EvaluationGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self, DensityError> {
        if n < 2 {
            return Err(DensityError::GridTooSmall(n));
        }
        if !(hi > lo) {
            return Err(DensityError::ZeroSpread);
        }
        let step = (hi - lo) / (n - 1) as f64;
        let points = (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
            .collect();
        Ok(Self { lo, hi, points })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.points.len() - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub grid: EvaluationGrid,
    pub values: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityEstimate {
    pub fn trapezoid_mass(&self) -> f64 {
        trapezoid(self.grid.points(), &self.values)
    }
}

/// Slack above 1 for [`DensityEstimate::trapezoid_mass`]. No mass leaves the
/// padded grid, so the exact integral is 1; the trapezoid rule on 512 points
/// overshoots by up to ~6e-4 at the kernel's support edges.
pub const TRAPEZOID_TOLERANCE: f64 = 1e-3;

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// `K(u) = (π/4) cos(πu/2)` on `[-1, 1]`, zero elsewhere.
#[inline]
pub fn cosine_kernel(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        FRAC_PI_4 * (FRAC_PI_2 * u).cos()
    } else {
        0.0
    }
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman–Fan type 7). `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sample standard deviation with the `n - 1` denominator.
pub fn sample_sd(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Silverman's rule of thumb, `0.9 · min(sd, IQR/1.34) · n^(-1/5)`.
/// Falls back to `sd` alone when the IQR is zero.
pub fn bandwidth(samples: &[f64]) -> Result<f64, DensityError> {
    if samples.len() < 2 {
        return Err(DensityError::TooFewSamples(samples.len()));
    }
    let sd = sample_sd(samples);
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    if !(spread > 0.0) {
        return Err(DensityError::ZeroSpread);
    }
    Ok(0.9 * spread * (samples.len() as f64).powf(-0.2))
}

/// Shared grid for two class samples: the combined range extended by
/// [`GRID_CUT`] times the larger class bandwidth on each side.
pub fn make_grid(
    class1: &[f64],
    class2: &[f64],
    h_max: f64,
    n_points: usize,
) -> Result<EvaluationGrid, DensityError> {
    let combined = class1.iter().chain(class2);
    let (min, max) = combined.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if !min.is_finite() {
        return Err(DensityError::Empty);
    }
    if !(h_max > 0.0) && max == min {
        return Err(DensityError::ZeroSpread);
    }
    let pad = GRID_CUT * h_max.max(0.0);
    EvaluationGrid::new(min - pad, max + pad, n_points)
}

/// Bandwidths of the two classes and their shared grid.
///
/// A class with zero spread borrows the other class's bandwidth; the call
/// fails only when both classes are degenerate.
pub fn class_bandwidths(class1: &[f64], class2: &[f64]) -> Result<(f64, f64), DensityError> {
    match (bandwidth(class1), bandwidth(class2)) {
        (Ok(a), Ok(b)) => Ok((a, b)),
        (Ok(a), Err(_)) => Ok((a, a)),
        (Err(_), Ok(b)) => Ok((b, b)),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Direct-summation kernel density estimate at every grid point.
pub fn estimate_density(
    samples: &[f64],
    grid: &EvaluationGrid,
    h: f64,
) -> Result<DensityEstimate, DensityError> {
    if samples.is_empty() {
        return Err(DensityError::Empty);
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(DensityError::BadBandwidth(h));
    }
    let norm = 1.0 / (samples.len() as f64 * h);
    let values = grid
        .points()
        .iter()
        .map(|&r| {
            norm * samples
                .iter()
                .map(|&s| cosine_kernel((r - s) / h))
                .sum::<f64>()
        })
        .collect();
    Ok(DensityEstimate {
        grid: grid.clone(),
        values,
        bandwidth: h,
    })
}
