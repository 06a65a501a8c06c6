//! Ordinary least-squares line fitting shared by every estimator.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Result of fitting `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero for a two-point or exact fit.
    pub slope_stderr: f64,
    pub r2: f64,
    pub n: usize,
}

impl LineFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    /// Sum of squared residuals of this fit over the given points.
    pub fn sse(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                let r = yi - self.predict(xi);
                r * r
            })
            .sum()
    }
}

/// Least-squares straight line through `(x, y)`.
///
/// Needs at least two points with distinct `x`. The summation order is the
/// input order, so results are reproducible bit for bit.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "fit_line: length mismatch {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "line fit needs at least 2 points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) || !sxx.is_finite() {
        return Err(Error::Numerical(
            "line fit: abscissae have zero spread".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = (syy - slope * sxy).max(0.0);
    let slope_stderr = if n > 2 {
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        r2,
        n,
    })
}

/// Fit in base-10 log-log space. Points with a non-positive coordinate are
/// rejected by the caller; here they produce an error.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument(
            "log-log fit needs strictly positive coordinates".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.log10()).collect();
    fit_line(&lx, &ly)
}

/// `count` points spaced evenly in log from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let d = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else {
                        (a + d * i as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Log-spaced integer window sizes in `[lo, hi]`, deduplicated.
pub fn log_spaced_sizes(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if hi < lo || count == 0 {
        return Vec::new();
    }
    let mut out: Vec<usize> = logspace(lo as f64, hi as f64, count)
        .into_iter()
        .map(|v| (v.round() as usize).clamp(lo, hi))
        .collect();
    out.dedup();
    out
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Median of a copy of `v`; `None` when empty.
pub(crate) fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    })
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(v: &[f64], p: f64) -> Option<f64> {
    if v.is_empty() || !(0.0..=1.0).contains(&p) {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let pos = p * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    Some(s[lo] * (1.0 - w) + s[hi] * w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14);
        assert!((f.intercept - 3.0).abs() < 1e-14);
        assert!(f.slope_stderr < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stderr_matches_textbook() {
        // y = x + (+1, -1, -1, +1): slope 1, sse 4, sxx 5
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 0.0, 1.0, 4.0];
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        let expected = (4.0f64 / 2.0 / 5.0).sqrt();
        assert!((f.slope_stderr - expected).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_line(&[1.0], &[1.0]).is_err());
        assert!(fit_line(&[1.0, 1.0], &[0.0, 2.0]).is_err());
        assert!(fit_loglog(&[1.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn logspace_endpoints() {
        let g = logspace(1e-3, 10.0, 5);
        assert_eq!(g.len(), 5);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert_eq!(g[4], 10.0);
        assert!((g[1] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn sizes_are_unique_and_bounded() {
        let s = log_spaced_sizes(10, 40, 16);
        assert_eq!(*s.first().unwrap(), 10);
        assert_eq!(*s.last().unwrap(), 40);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn quantiles() {
        let v = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(quantile(&v, 0.0), Some(1.0));
        assert_eq!(quantile(&v, 1.0), Some(4.0));
        assert_eq!(quantile(&v, 0.5), Some(2.5));
        assert_eq!(median(&v), Some(2.5));
    }
}
