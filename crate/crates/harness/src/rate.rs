//! Least-squares rate estimates and oscillation counts.

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const MIN_WINDOW: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMode {
    /// `log value` against `log k`: the slope is the polynomial order.
    Poly,
    /// `log value` against `k`: the slope is `log q` for a `q^k` decay.
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub mode: RateMode,
    pub slope: f64,
    pub intercept: f64,
    /// Abscissa range `[lo, hi]` that was fitted.
    pub window: (f64, f64),
    pub points: usize,
    /// RMS of the fit residual in log space.
    pub residual: f64,
    /// Strict local maxima of the values inside the window.
    pub oscillation_count: usize,
}

/// Fits `log v = slope · u + intercept` over the points with abscissa in
/// `window`, where `u` is `log x` or `x` depending on `mode`.
pub fn rate_fit(series: &[(f64, f64)], window: (f64, f64), mode: RateMode) -> Result<RateReport> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(HarnessError::Rate(format!("empty window [{lo}, {hi}]")));
    }
    let inside: Vec<(usize, f64, f64)> = series
        .iter()
        .enumerate()
        .filter(|(_, (x, _))| *x >= lo && *x <= hi)
        .map(|(i, &(x, v))| (i, x, v))
        .collect();
    if inside.len() < MIN_WINDOW {
        return Err(HarnessError::Rate(format!(
            "window [{lo}, {hi}] holds {} points, at least {MIN_WINDOW} needed",
            inside.len()
        )));
    }
    let bad: Vec<usize> = inside.iter().filter(|(_, _, v)| !(*v > 0.0) || !v.is_finite()).map(|t| t.0).collect();
    if !bad.is_empty() {
        return Err(HarnessError::Rate(format!("nonpositive or non-finite values at indices {bad:?}")));
    }
    if mode == RateMode::Poly && inside.iter().any(|t| !(t.1 > 0.0)) {
        return Err(HarnessError::Rate("polynomial mode needs positive abscissae".into()));
    }
    let us: Vec<f64> = inside.iter().map(|t| if mode == RateMode::Poly { t.1.ln() } else { t.1 }).collect();
    let ys: Vec<f64> = inside.iter().map(|t| t.2.ln()).collect();
    let n = us.len() as f64;
    let mu = us.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let suu: f64 = us.iter().map(|u| (u - mu) * (u - mu)).sum();
    let suy: f64 = us.iter().zip(&ys).map(|(u, y)| (u - mu) * (y - my)).sum();
    let slope = suy / suu;
    let intercept = my - slope * mu;
    let residual = (us.iter().zip(&ys).map(|(u, y)| (y - slope * u - intercept).powi(2)).sum::<f64>() / n).sqrt();
    let values: Vec<f64> = inside.iter().map(|t| t.2).collect();
    Ok(RateReport {
        mode,
        slope,
        intercept,
        window,
        points: inside.len(),
        residual,
        oscillation_count: oscillation_count(&values),
    })
}

/// Number of strict interior local maxima.
pub fn oscillation_count(series: &[f64]) -> usize {
    series.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count()
}

/// `max_{j ≥ i} v_j`: a nonincreasing majorant that hides oscillation.
pub fn upper_envelope(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].max(out[i + 1]);
    }
    out
}

/// Drops points whose value is at or below `floor` (round-off level).
pub fn above_floor(series: &[(f64, f64)], floor: f64) -> Vec<(f64, f64)> {
    series.iter().copied().filter(|&(_, v)| v > floor).collect()
}

/// Slope change when the window start is doubled.
pub fn window_sensitivity(series: &[(f64, f64)], window: (f64, f64), mode: RateMode) -> Result<f64> {
    let base = rate_fit(series, window, mode)?;
    let shifted = rate_fit(series, (2.0 * window.0, window.1), mode)?;
    Ok((base.slope - shifted.slope).abs())
}
