//! Degree-1 local regression with tricube weights.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_SPAN: f64 = 0.75;

#[derive(Debug, Error, PartialEq)]
pub enum LoessError {
    #[error("x and y lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("span {span} leaves fewer than 2 points in each window of {n}")]
    SpanTooSmall { span: f64, n: usize },
    #[error("abscissae must be finite and strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("non-finite response at index {0}")]
    NonFinite(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoessFit {
    pub design_x: Vec<f64>,
    pub fitted_y: Vec<f64>,
    pub span: f64,
    pub degree: u8,
    /// Design points whose local fit fell back to a weighted mean.
    #[serde(default)]
    pub degenerate_windows: usize,
}

#[inline]
fn tricube(d: f64) -> f64 {
    if d >= 1.0 {
        0.0
    } else {
        let t = 1.0 - d * d * d;
        t * t * t
    }
}

/// Start of the `q`-point window of sorted `x` nearest to `x[k]`.
fn nearest_window(x: &[f64], k: usize, q: usize, mut lo: usize) -> usize {
    let n = x.len();
    let target = x[k];
    lo = lo.min(n - q);
    // Slide right while the point leaving on the left is farther than the
    // point entering on the right.
    while lo + q < n && target - x[lo] > x[lo + q] - target {
        lo += 1;
    }
    lo
}

/// Local linear fit at `x0` using the window `xs`, `ys`. Returns the fitted
/// value and whether the fit degenerated to a weighted mean.
fn local_linear(xs: &[f64], ys: &[f64], x0: f64, d_max: f64) -> (f64, bool) {
    let mut sw = 0.0;
    let mut swx = 0.0;
    let mut swy = 0.0;
    let weights: Vec<f64> = xs
        .iter()
        .map(|&x| {
            if d_max > 0.0 {
                tricube((x - x0).abs() / d_max)
            } else {
                1.0
            }
        })
        .collect();
    for ((&w, &x), &y) in weights.iter().zip(xs).zip(ys) {
        sw += w;
        swx += w * (x - x0);
        swy += w * y;
    }
    let xbar = swx / sw;
    let ybar = swy / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((&w, &x), &y) in weights.iter().zip(xs).zip(ys) {
        let dx = x - x0 - xbar;
        sxx += w * dx * dx;
        sxy += w * dx * (y - ybar);
    }
    let scale = d_max.max(f64::MIN_POSITIVE);
    if sxx <= 1e-12 * sw * scale * scale {
        (ybar, true)
    } else {
        // Line evaluated at x0, i.e. at centered abscissa 0.
        (ybar - (sxy / sxx) * xbar, false)
    }
}

/// Fits degree-1 LOESS at every design point.
///
/// Each window holds the `ceil(span · n)` nearest neighbors; weights are
/// tricube in distance relative to the farthest of them. No robustness
/// iterations. A window whose weighted abscissae have no spread falls back
/// to the weighted mean (counted in `degenerate_windows`).
pub fn loess_fit(x: &[f64], y: &[f64], span: f64) -> Result<LoessFit, LoessError> {
    let n = x.len();
    if n != y.len() {
        return Err(LoessError::LengthMismatch(n, y.len()));
    }
    if n < 4 {
        return Err(LoessError::TooFewPoints(n));
    }
    if !(span > 0.0 && span <= 1.0) || span * (n as f64) < 2.0 {
        return Err(LoessError::SpanTooSmall { span, n });
    }
    for i in 0..n {
        if !x[i].is_finite() || (i > 0 && x[i] <= x[i - 1]) {
            return Err(LoessError::NotIncreasing(i));
        }
        if !y[i].is_finite() {
            return Err(LoessError::NonFinite(i));
        }
    }
    let q = ((span * n as f64).ceil() as usize).clamp(2, n);

    let mut fitted = Vec::with_capacity(n);
    let mut degenerate = 0;
    let mut lo = 0;
    for k in 0..n {
        lo = nearest_window(x, k, q, lo);
        let (xs, ys) = (&x[lo..lo + q], &y[lo..lo + q]);
        let d_max = (x[k] - xs[0]).max(xs[q - 1] - x[k]);
        let (v, fell_back) = local_linear(xs, ys, x[k], d_max);
        degenerate += usize::from(fell_back);
        fitted.push(v);
    }
    if degenerate > 0 {
        log::warn!("loess: {degenerate} of {n} windows fell back to a weighted mean");
    }
    Ok(LoessFit {
        design_x: x.to_vec(),
        fitted_y: fitted,
        span,
        degree: 1,
        degenerate_windows: degenerate,
    })
}

/// Piecewise-linear interpolation of the fitted curve, held constant beyond
/// either end of the design range.
pub fn loess_predict(fit: &LoessFit, x_new: f64) -> f64 {
    let xs = &fit.design_x;
    let ys = &fit.fitted_y;
    let last = xs.len() - 1;
    if x_new.is_nan() {
        return f64::NAN;
    }
    if x_new <= xs[0] {
        return ys[0];
    }
    if x_new >= xs[last] {
        return ys[last];
    }
    // First index with xs[i] > x_new; 1 <= i <= last.
    let i = xs.partition_point(|&v| v <= x_new);
    let (x0, x1) = (xs[i - 1], xs[i]);
    if x_new == x0 {
        return ys[i - 1];
    }
    let t = (x_new - x0) / (x1 - x0);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

impl LoessFit {
    pub fn predict(&self, x_new: f64) -> f64 {
        loess_predict(self, x_new)
    }
}
