use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fit::fit_loglog;
use crate::series::UniformSeries;
use crate::{Error, Result};

/// Mean rescaled range per window length and the fitted Hurst exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RsCurve {
    pub n_values: Vec<usize>,
    pub rs_means: Vec<f64>,
    pub hurst: f64,
    pub slope_stderr: f64,
    pub r2: f64,
    /// Window lengths dropped because every window had zero variance.
    pub dropped: Vec<usize>,
}

/// `(R/S)_n` averaged over the `⌊N/n⌋` disjoint windows of length `n`
/// (remainder discarded), using the sample (`n − 1`) standard deviation.
/// `None` when every window is flat.
fn mean_rescaled_range(values: &[f64], n: usize) -> Option<f64> {
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut cum = Vec::with_capacity(n);
    for w in values.chunks_exact(n) {
        let mean = w.iter().sum::<f64>() / n as f64;
        let var = w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        if !(sd > 0.0) {
            continue;
        }
        cum.clear();
        let mut acc = 0.0;
        for x in w {
            acc += x - mean;
            cum.push(acc);
        }
        let (lo, hi) = cum
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        sum += (hi - lo) / sd;
        used += 1;
    }
    (used > 0).then(|| sum / used as f64)
}

/// Rescaled range analysis; `H` is the slope of `lg (R/S)_n` against `lg n`.
pub fn rescaled_range(u: &UniformSeries, n_list: &[usize]) -> Result<RsCurve> {
    let len = u.len();
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if let Some(&bad) = ns.iter().find(|&&n| n < 4 || n > len / 2) {
        return Err(Error::InvalidArgument(format!(
            "R/S window length {bad} outside [4, N/2] for N = {len}"
        )));
    }
    let results: Vec<Option<f64>> = ns
        .par_iter()
        .map(|&n| mean_rescaled_range(&u.values, n))
        .collect();
    let mut n_values = Vec::new();
    let mut rs_means = Vec::new();
    let mut dropped = Vec::new();
    for (&n, r) in ns.iter().zip(results) {
        match r {
            Some(v) if v > 0.0 => {
                n_values.push(n);
                rs_means.push(v);
            }
            _ => {
                tracing::warn!(n, "all R/S windows flat; window length dropped");
                dropped.push(n);
            }
        }
    }
    if n_values.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "R/S needs at least 3 usable window lengths, got {}",
            n_values.len()
        )));
    }
    let x: Vec<f64> = n_values.iter().map(|&n| n as f64).collect();
    let fit = fit_loglog(&x, &rs_means)?;
    Ok(RsCurve {
        n_values,
        rs_means,
        hurst: fit.slope,
        slope_stderr: fit.slope_stderr,
        r2: fit.r2,
        dropped,
    })
}
