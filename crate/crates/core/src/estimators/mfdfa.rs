use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fit::fit_loglog;
use crate::series::{profile, UniformSeries};
use crate::{Error, Result};

/// Moment orders plotted for the generalized Hurst exponent by default.
pub const DEFAULT_Q_VALUES: [f64; 11] =
    [-4.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0];

/// Fluctuation functions `F_q(n)`, indexed `f[q][n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfdfaSurface {
    pub q_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub f: Vec<Vec<f64>>,
    /// Boxes with zero residual variance, left out of the `q <= 0` averages.
    pub zero_boxes: usize,
}

impl MfdfaSurface {
    pub fn column(&self, qi: usize) -> &[f64] {
        &self.f[qi]
    }
}

/// Residual variance of a least-squares line through `y` against `0..n`.
fn detrended_variance(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let kbar = (n - 1.0) / 2.0;
    let ybar = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (k, &v) in y.iter().enumerate() {
        let dk = k as f64 - kbar;
        sxy += dk * (v - ybar);
        sxx += dk * dk;
    }
    let slope = sxy / sxx;
    y.iter()
        .enumerate()
        .map(|(k, &v)| {
            let r = v - ybar - slope * (k as f64 - kbar);
            r * r
        })
        .sum::<f64>()
        / n
}

/// Per-box variances for box size `n`: `m` boxes from the start followed by
/// `m` boxes from the end, so the remainder is used.
fn box_variances(prof: &[f64], n: usize) -> Vec<f64> {
    let len = prof.len();
    let m = len / n;
    let mut out = Vec::with_capacity(2 * m);
    for j in 0..m {
        out.push(detrended_variance(&prof[j * n..(j + 1) * n]));
    }
    for j in 0..m {
        out.push(detrended_variance(&prof[len - (j + 1) * n..len - j * n]));
    }
    out
}

fn fluctuation(f2: &[f64], q: f64) -> f64 {
    if q == 0.0 {
        let logs: Vec<f64> = f2.iter().filter(|&&v| v > 0.0).map(|v| v.ln()).collect();
        (0.5 * logs.iter().sum::<f64>() / logs.len() as f64).exp()
    } else if q < 0.0 {
        let pos: Vec<f64> = f2.iter().copied().filter(|&v| v > 0.0).collect();
        let mean = pos.iter().map(|v| v.powf(0.5 * q)).sum::<f64>() / pos.len() as f64;
        mean.powf(1.0 / q)
    } else {
        let mean = f2.iter().map(|v| v.powf(0.5 * q)).sum::<f64>() / f2.len() as f64;
        mean.powf(1.0 / q)
    }
}

/// Multifractal DFA with linear detrending of the integrated series.
pub fn mfdfa(u: &UniformSeries, n_list: &[usize], q_list: &[f64]) -> Result<MfdfaSurface> {
    let len = u.len();
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() || q_list.is_empty() {
        return Err(Error::InvalidArgument(
            "MF-DFA needs box sizes and q values".into(),
        ));
    }
    if let Some(&bad) = ns.iter().find(|&&n| n < 8 || n > len / 4) {
        return Err(Error::InvalidArgument(format!(
            "MF-DFA box size {bad} outside [8, N/4] for N = {len}"
        )));
    }
    if let Some(q) = q_list.iter().find(|q| !q.is_finite()) {
        return Err(Error::InvalidArgument(format!("q must be finite, got {q}")));
    }
    let prof = profile(&u.values);
    let per_n: Vec<Vec<f64>> = ns.par_iter().map(|&n| box_variances(&prof, n)).collect();
    let zero_boxes: usize = per_n
        .iter()
        .map(|v| v.iter().filter(|&&x| x == 0.0).count())
        .sum();
    if zero_boxes > 0 {
        tracing::warn!(zero_boxes, "boxes with zero variance excluded for q <= 0");
    }
    let f = q_list
        .iter()
        .map(|&q| per_n.iter().map(|f2| fluctuation(f2, q)).collect())
        .collect();
    Ok(MfdfaSurface {
        q_values: q_list.to_vec(),
        n_values: ns,
        f,
        zero_boxes,
    })
}

/// Generalized Hurst exponent for one `q`; `hurst` is `None` when the
/// fluctuation function is degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedHurst {
    pub q: f64,
    pub hurst: Option<f64>,
    pub stderr: Option<f64>,
}

/// Slope of `lg F_q(n)` against `lg n` for every `q` of the surface.
pub fn generalized_hurst(surface: &MfdfaSurface) -> Result<Vec<GeneralizedHurst>> {
    if surface.n_values.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "generalized Hurst needs at least 3 box sizes, got {}",
            surface.n_values.len()
        )));
    }
    let x: Vec<f64> = surface.n_values.iter().map(|&n| n as f64).collect();
    Ok(surface
        .q_values
        .iter()
        .zip(&surface.f)
        .map(|(&q, fq)| {
            let degenerate =
                fq.iter().any(|v| !(v.is_finite() && *v > 0.0)) || fq.iter().all(|v| *v == fq[0]);
            let fit = if degenerate {
                None
            } else {
                fit_loglog(&x, fq).ok()
            };
            GeneralizedHurst {
                q,
                hurst: fit.map(|f| f.slope),
                stderr: fit.map(|f| f.slope_stderr),
            }
        })
        .collect())
}
