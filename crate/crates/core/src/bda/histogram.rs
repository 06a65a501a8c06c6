use serde::{Deserialize, Serialize};

use crate::fit::{fit_line, logspace};
use crate::{Error, Result};

/// Fewest nonzero bins accepted by [`fit_powerlaw_region`].
pub const MIN_FIT_BINS: usize = 5;
/// Fewest nonzero bins accepted by [`select_fit_region`].
pub const MIN_REGION_BINS: usize = 12;
/// Smallest span of a candidate fit window, in decades.
pub const MIN_REGION_DECADES: f64 = 2.0;

/// r² values closer than this count as equal during region selection.
const R2_TIE: f64 = 1e-12;

/// Histogram density on geometric bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBinnedPdf {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl LogBinnedPdf {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    /// Geometric bin centers.
    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|w| (w[0] * w[1]).sqrt())
            .collect()
    }

    pub fn nonzero_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// `Σ density × width`, one up to rounding.
    pub fn integral(&self) -> f64 {
        self.densities
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(d, w)| d * (w[1] - w[0]))
            .sum()
    }
}

/// Log-binned density of positive durations: `bins_per_decade` geometric
/// bins per decade between the smallest and largest value, with density
/// `count / (N · width)`. Empty bins stay in with density zero.
pub fn log_binned_pdf(durations: &[f64], bins_per_decade: usize) -> Result<LogBinnedPdf> {
    if bins_per_decade < 2 {
        return Err(Error::InvalidArgument(format!(
            "bins_per_decade must be at least 2, got {bins_per_decade}"
        )));
    }
    if durations.is_empty() {
        return Err(Error::InsufficientData("no durations to bin".into()));
    }
    if let Some(bad) = durations.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "durations must be positive and finite, got {bad}"
        )));
    }
    let lo = durations.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = durations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Err(Error::DegenerateSupport(format!(
            "all {} durations equal {lo}",
            durations.len()
        )));
    }
    let decades = (hi / lo).log10();
    let n_bins = ((decades * bins_per_decade as f64).ceil() as usize).max(1);
    let edges = logspace(lo, hi, n_bins + 1);
    let scale = n_bins as f64 / (hi / lo).ln();
    let mut counts = vec![0u64; n_bins];
    for &d in durations {
        let mut k = (((d / lo).ln() * scale) as usize).min(n_bins - 1);
        // settle rounding at bin edges against the stored edges
        while k > 0 && d < edges[k] {
            k -= 1;
        }
        while k + 1 < n_bins && d >= edges[k + 1] {
            k += 1;
        }
        counts[k] += 1;
    }
    let total = durations.len() as u64;
    let densities = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (total as f64 * (w[1] - w[0])))
        .collect();
    Ok(LogBinnedPdf {
        bin_edges: edges,
        densities,
        counts,
        total,
    })
}

/// Power law `P(T) ∝ T^{-γ}` fitted over `[t_lo, t_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub gamma: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub stderr: f64,
    pub r2: f64,
    pub n_bins: usize,
}

/// Fit range chosen by [`select_fit_region`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRegion {
    pub t_lo: f64,
    pub t_hi: f64,
    /// Set when no window spanned the minimum width and the full support
    /// was used instead.
    pub fallback: bool,
}

/// Least squares of `lg density` on `lg T_center` over the nonzero bins
/// whose center lies in `[t_lo, t_hi]`.
pub fn fit_powerlaw_region(pdf: &LogBinnedPdf, t_lo: f64, t_hi: f64) -> Result<PowerLawFit> {
    if !(t_lo < t_hi) {
        return Err(Error::InvalidArgument(format!(
            "fit region [{t_lo}, {t_hi}] is empty"
        )));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pdf
        .centers()
        .into_iter()
        .zip(&pdf.densities)
        .filter(|(c, d)| **d > 0.0 && *c >= t_lo && *c <= t_hi)
        .map(|(c, d)| (c.log10(), d.log10()))
        .unzip();
    if x.len() < MIN_FIT_BINS {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs {MIN_FIT_BINS} nonzero bins in [{t_lo}, {t_hi}], found {}",
            x.len()
        )));
    }
    let fit = fit_line(&x, &y)?;
    Ok(PowerLawFit {
        gamma: -fit.slope,
        t_lo,
        t_hi,
        stderr: fit.slope_stderr,
        r2: fit.r2,
        n_bins: x.len(),
    })
}

/// Window of contiguous nonzero bins spanning at least two decades with the
/// straightest log-log profile (largest r²). Ties go to the widest window,
/// then to the one further right.
pub fn select_fit_region(pdf: &LogBinnedPdf) -> Result<FitRegion> {
    let nonzero = pdf.nonzero_bins();
    if nonzero < MIN_REGION_BINS {
        return Err(Error::InsufficientData(format!(
            "fit region search needs {MIN_REGION_BINS} nonzero bins, found {nonzero}"
        )));
    }
    let edges = &pdf.bin_edges;
    let lx: Vec<f64> = pdf.centers().iter().map(|c| c.log10()).collect();
    let ly: Vec<f64> = pdf
        .densities
        .iter()
        .map(|&d| if d > 0.0 { d.log10() } else { f64::NAN })
        .collect();
    let n = pdf.n_bins();
    // (r2, bins, start, end)
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for i in 0..n {
        for j in i..n {
            if pdf.counts[j] == 0 {
                break;
            }
            if j + 1 - i < MIN_FIT_BINS
                || (edges[j + 1] / edges[i]).log10() < MIN_REGION_DECADES * (1.0 - 1e-12)
            {
                continue;
            }
            let Ok(fit) = fit_line(&lx[i..=j], &ly[i..=j]) else {
                continue;
            };
            let bins = j - i + 1;
            let better = match best {
                None => true,
                Some((r2, b, s, _)) => {
                    if fit.r2 > r2 + R2_TIE {
                        true
                    } else if fit.r2 < r2 - R2_TIE {
                        false
                    } else {
                        bins > b || (bins == b && i > s)
                    }
                }
            };
            if better {
                best = Some((fit.r2, bins, i, j));
            }
        }
    }
    Ok(match best {
        Some((_, _, i, j)) => FitRegion {
            t_lo: edges[i],
            t_hi: edges[j + 1],
            fallback: false,
        },
        None => {
            tracing::warn!("no fit window spans two decades; using the full support");
            FitRegion {
                t_lo: edges[0],
                t_hi: edges[n],
                fallback: true,
            }
        }
    })
}

/// `H = 2 − γ`.
pub fn hurst_from_bda(fit: &PowerLawFit) -> f64 {
    if !(1.0..=2.0).contains(&fit.gamma) {
        tracing::warn!(gamma = fit.gamma, "duration exponent outside [1, 2]");
    }
    2.0 - fit.gamma
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn synthetic_pdf(edges: Vec<f64>, density: impl Fn(f64) -> f64) -> LogBinnedPdf {
        let centers: Vec<f64> = edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
        let densities: Vec<f64> = centers.iter().map(|&c| density(c)).collect();
        LogBinnedPdf {
            counts: densities.iter().map(|&d| u64::from(d > 0.0)).collect(),
            densities,
            bin_edges: edges,
            total: 1,
        }
    }

    /// Inverse-CDF draws from the density ∝ T^{-a} on [lo, hi].
    fn pareto(n: usize, a: f64, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = 1.0 - a;
        let (l, h) = (lo.powf(e), hi.powf(e));
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                (l + u * (h - l)).powf(1.0 / e)
            })
            .collect()
    }

    #[test]
    fn degenerate_support() {
        assert!(matches!(
            log_binned_pdf(&[3.0, 3.0, 3.0], 10),
            Err(Error::DegenerateSupport(_))
        ));
        assert!(log_binned_pdf(&[], 10).is_err());
        assert!(log_binned_pdf(&[1.0, 2.0], 1).is_err());
        assert!(log_binned_pdf(&[1.0, -2.0], 10).is_err());
    }

    #[test]
    fn narrow_support_single_bin() {
        let pdf = log_binned_pdf(&[5.0, 5.0001, 5.00005], 10).unwrap();
        assert_eq!(pdf.n_bins(), 1);
        assert_eq!(pdf.counts, vec![3]);
        assert!((pdf.integral() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn normalization_and_edges() {
        let d = pareto(10_000, 1.5, 1.0, 1e4, 3);
        let pdf = log_binned_pdf(&d, 10).unwrap();
        assert_eq!(pdf.counts.iter().sum::<u64>(), 10_000);
        assert!((pdf.integral() - 1.0).abs() < 1e-6);
        assert!(pdf.densities.iter().all(|&x| x >= 0.0));
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = d.iter().copied().fold(0.0, f64::max);
        assert_eq!(pdf.bin_edges[0], lo);
        assert_eq!(*pdf.bin_edges.last().unwrap(), hi);
        let mut doubled = d.clone();
        doubled.extend_from_slice(&d);
        let pdf2 = log_binned_pdf(&doubled, 10).unwrap();
        for (a, b) in pdf.densities.iter().zip(&pdf2.densities) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn pareto_slope_recovered() {
        let d = pareto(1_000_000, 1.5, 1.0, 1e4, 11);
        let pdf = log_binned_pdf(&d, 10).unwrap();
        let fit =
            fit_powerlaw_region(&pdf, pdf.bin_edges[0], *pdf.bin_edges.last().unwrap()).unwrap();
        assert!((fit.gamma - 1.5).abs() < 0.03, "gamma = {}", fit.gamma);
        assert!((fit.gamma - 1.5).abs() < 2.0 * fit.stderr.max(0.005));
    }

    #[test]
    fn exact_power_law_bins() {
        let pdf = synthetic_pdf(logspace(1.0, 1e4, 41), |t| 7.0 * t.powf(-1.3));
        let fit = fit_powerlaw_region(&pdf, 1.0, 1e4).unwrap();
        assert!((fit.gamma - 1.3).abs() < 1e-12);
        let region = select_fit_region(&pdf).unwrap();
        assert!(!region.fallback);
        assert_eq!((region.t_lo, region.t_hi), (1.0, 1e4));
    }

    #[test]
    fn region_lands_in_middle_segment() {
        // T^{-0.9} below 10, T^{-1.3} from 10 to 1e4, exponential cutoff beyond
        let density = |t: f64| {
            if t < 10.0 {
                t.powf(-0.9)
            } else if t < 1e4 {
                10f64.powf(0.4) * t.powf(-1.3)
            } else {
                10f64.powf(0.4) * t.powf(-1.3) * (-(t - 1e4) / 2e3).exp()
            }
        };
        let pdf = synthetic_pdf(logspace(1.0, 1e5, 51), density);
        let region = select_fit_region(&pdf).unwrap();
        assert!(region.t_lo >= 10.0 * (1.0 - 1e-9), "{region:?}");
        assert!(region.t_hi <= 1e4 * (1.0 + 1e-9), "{region:?}");
        let fit = fit_powerlaw_region(&pdf, region.t_lo, region.t_hi).unwrap();
        assert!((fit.gamma - 1.3).abs() < 1e-9);
    }

    #[test]
    fn narrow_support_falls_back() {
        let pdf = synthetic_pdf(logspace(1.0, 10.0, 16), |t| t.powf(-1.5));
        let region = select_fit_region(&pdf).unwrap();
        assert!(region.fallback);
        assert_eq!((region.t_lo, region.t_hi), (1.0, 10.0));
    }

    #[test]
    fn too_few_bins() {
        let pdf = synthetic_pdf(logspace(1.0, 1e3, 12), |t| t.powf(-1.5));
        assert!(select_fit_region(&pdf).is_err());
        let sparse = synthetic_pdf(logspace(1.0, 1e3, 5), |t| t.powf(-1.5));
        assert!(fit_powerlaw_region(&sparse, 1.0, 1e3).is_err());
    }

    #[test]
    fn hurst_relation() {
        let fit = |gamma| PowerLawFit {
            gamma,
            t_lo: 1.0,
            t_hi: 10.0,
            stderr: 0.01,
            r2: 1.0,
            n_bins: 5,
        };
        assert!((hurst_from_bda(&fit(1.5)) - 0.5).abs() < 1e-15);
        assert!((hurst_from_bda(&fit(1.28)) - 0.72).abs() < 1e-12);
        assert!((hurst_from_bda(&fit(1.32)) - 0.68).abs() < 1e-12);
        assert!((hurst_from_bda(&fit(2.5)) + 0.5).abs() < 1e-15);
    }
}
