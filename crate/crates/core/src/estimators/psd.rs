use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fit::{fit_line, fit_loglog, logspace, LineFit};
use crate::series::Series;
use crate::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 200;
/// Minimum number of grid points on each side of a spectral break.
pub const MIN_POINTS_PER_REGIME: usize = 8;

/// Power-law fit of a spectrum with one break: `S ~ f^{-β_low}` below
/// `f_break` and `S ~ f^{-β_high}` above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoRegimeFit {
    pub beta_low: f64,
    pub beta_high: f64,
    pub f_break: f64,
    pub stderr_low: f64,
    pub stderr_high: f64,
    pub r2_low: f64,
    pub r2_high: f64,
}

/// Spectral density on a frequency grid. Frequencies are in cycles per unit
/// of the series clock (Hz or ticks⁻¹).
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    pub n_days_averaged: usize,
    pub fit: Option<TwoRegimeFit>,
}

/// `count` log-spaced frequencies from the fundamental `1/span` up to half
/// the mean event rate.
pub fn frequency_grid(span: f64, mean_rate: f64, count: usize) -> Result<Vec<f64>> {
    let lo = 1.0 / span;
    let hi = 0.5 * mean_rate;
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "empty frequency band [{lo}, {hi}]"
        )));
    }
    Ok(logspace(lo, hi, count))
}

/// Periodogram of a non-uniformly sampled series, summed directly over the
/// event times:
///
/// `S(f) = |Σ_j X_j exp(i ω t_j)|² / (2π t_n)` with `ω = 2πf` and `t_n` the
/// series span.
pub fn periodogram(series: &Series, freq_grid: &[f64]) -> Result<PsdEstimate> {
    if series.len() < 2 {
        return Err(Error::InsufficientData(
            "periodogram needs at least 2 points".into(),
        ));
    }
    let span = series.span();
    if !(span > 0.0) {
        return Err(Error::InsufficientData(
            "periodogram needs a positive span".into(),
        ));
    }
    periodogram_with_span(series, freq_grid, span)
}

/// [`periodogram`] with an explicit normalising length `t_n`.
pub fn periodogram_with_span(series: &Series, freq_grid: &[f64], span: f64) -> Result<PsdEstimate> {
    if freq_grid.is_empty() {
        return Err(Error::InvalidArgument("empty frequency grid".into()));
    }
    if freq_grid.iter().any(|&f| !(f > 0.0) || !f.is_finite()) {
        return Err(Error::InvalidArgument(
            "frequencies must be positive".into(),
        ));
    }
    if !(span > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "span must be positive, got {span}"
        )));
    }
    let Some(&t0) = series.times.first() else {
        return Err(Error::InsufficientData(
            "periodogram of an empty series".into(),
        ));
    };
    // times relative to the first point: the modulus is translation invariant
    // and the phases stay small
    let rel: Vec<f64> = series.times.iter().map(|t| t - t0).collect();
    let norm = 1.0 / (2.0 * std::f64::consts::PI * span);
    let power = freq_grid
        .par_iter()
        .map(|&f| {
            let omega = 2.0 * std::f64::consts::PI * f;
            let (mut re, mut im) = (0.0, 0.0);
            for (&t, &x) in rel.iter().zip(&series.values) {
                let (s, c) = (omega * t).sin_cos();
                re += x * c;
                im += x * s;
            }
            (re * re + im * im) * norm
        })
        .collect();
    Ok(PsdEstimate {
        frequencies: freq_grid.to_vec(),
        power,
        n_days_averaged: 1,
        fit: None,
    })
}

/// Arithmetic mean of per-day periodograms on a shared grid.
pub fn average_daily_psd(days: &[Series], freq_grid: &[f64]) -> Result<PsdEstimate> {
    if days.is_empty() {
        return Err(Error::InsufficientData("no days to average".into()));
    }
    let mut sum = vec![0.0; freq_grid.len()];
    for day in days {
        let p = periodogram(day, freq_grid)?;
        for (s, v) in sum.iter_mut().zip(&p.power) {
            *s += v;
        }
    }
    let k = days.len() as f64;
    Ok(PsdEstimate {
        frequencies: freq_grid.to_vec(),
        power: sum.into_iter().map(|s| s / k).collect(),
        n_days_averaged: days.len(),
        fit: None,
    })
}

/// Two-line log-log fit with the break chosen to minimise the total squared
/// residual over every admissible split of the grid.
pub fn fit_two_regime_psd(psd: &PsdEstimate) -> Result<TwoRegimeFit> {
    let (lf, lp): (Vec<f64>, Vec<f64>) = psd
        .frequencies
        .iter()
        .zip(&psd.power)
        .filter(|(f, p)| **f > 0.0 && **p > 0.0)
        .map(|(f, p)| (f.log10(), p.log10()))
        .unzip();
    let n = lf.len();
    let k_min = MIN_POINTS_PER_REGIME;
    if n < 2 * k_min {
        return Err(Error::InsufficientData(format!(
            "two-regime fit needs at least {} positive points, got {n}",
            2 * k_min
        )));
    }
    let mut best: Option<(f64, usize, LineFit, LineFit)> = None;
    for k in k_min..=n - k_min {
        let low = fit_line(&lf[..k], &lp[..k])?;
        let high = fit_line(&lf[k..], &lp[k..])?;
        let sse = low.sse(&lf[..k], &lp[..k]) + high.sse(&lf[k..], &lp[k..]);
        if best.as_ref().is_none_or(|b| sse < b.0) {
            best = Some((sse, k, low, high));
        }
    }
    let (_, k, low, high) = best.expect("at least one split");
    // break at the intersection of the two lines when it falls between the
    // grid points on either side of the split
    let (a, b) = (lf[k - 1], lf[k]);
    let mid = 0.5 * (a + b);
    let cross = if (low.slope - high.slope).abs() > 1e-12 {
        (high.intercept - low.intercept) / (low.slope - high.slope)
    } else {
        mid
    };
    let lb = if (a..=b).contains(&cross) { cross } else { mid };
    Ok(TwoRegimeFit {
        beta_low: -low.slope,
        beta_high: -high.slope,
        f_break: 10f64.powf(lb),
        stderr_low: low.slope_stderr,
        stderr_high: high.slope_stderr,
        r2_low: low.r2,
        r2_high: high.r2,
    })
}

/// Log-log least-squares fit over the grid points with `f <= f_max`.
pub fn low_frequency_slope(psd: &PsdEstimate, f_max: f64) -> Result<LineFit> {
    let (f, p): (Vec<f64>, Vec<f64>) = psd
        .frequencies
        .iter()
        .zip(&psd.power)
        .filter(|(f, p)| **f <= f_max && **p > 0.0)
        .map(|(f, p)| (*f, *p))
        .unzip();
    fit_loglog(&f, &p)
}

/// `H = (1 + β) / 2` from the low-frequency spectral exponent.
pub fn hurst_from_psd(beta_low: f64) -> f64 {
    if !(0.0..=1.0).contains(&beta_low) {
        tracing::warn!(
            beta_low,
            "spectral exponent outside [0, 1]; H is formal only"
        );
    }
    0.5 * (1.0 + beta_low)
}
