use rayon::prelude::*;

use super::durations::{extract_durations, threshold_passages, DurationKind};
use super::histogram::{
    fit_powerlaw_region, hurst_from_bda, log_binned_pdf, select_fit_region, FitRegion,
    LogBinnedPdf, PowerLawFit,
};
use crate::series::Series;
use crate::{Error, Result};

pub const DEFAULT_BINS_PER_DECADE: usize = 10;
/// Empirical quantiles used as default thresholds, alongside `h_x = 0`.
pub const DEFAULT_QUANTILES: [f64; 3] = [0.45, 0.50, 0.55];

#[derive(Debug, Clone, PartialEq)]
pub struct BdaConfig {
    pub thresholds: Vec<f64>,
    pub bins_per_decade: usize,
    /// Durations shorter than this many median sample gaps are left out of
    /// the histogram and fit.
    pub min_duration_samples: f64,
}

impl BdaConfig {
    pub fn new(thresholds: Vec<f64>) -> Self {
        BdaConfig {
            thresholds,
            bins_per_decade: DEFAULT_BINS_PER_DECADE,
            min_duration_samples: 2.0,
        }
    }
}

/// Histogram, fit region and power-law fit of one duration multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct BdaFit {
    pub pdf: LogBinnedPdf,
    pub region: FitRegion,
    pub fit: PowerLawFit,
    pub hurst: f64,
}

#[derive(Debug)]
pub struct KindOutcome {
    pub kind: DurationKind,
    pub threshold: f64,
    /// Durations kept after the discreteness floor.
    pub n_durations: usize,
    /// Durations dropped by the discreteness floor.
    pub excluded_short: usize,
    pub result: Result<BdaFit>,
}

#[derive(Debug)]
pub struct ThresholdReport {
    pub threshold: f64,
    pub n_passages: usize,
    pub outcomes: Vec<KindOutcome>,
}

impl ThresholdReport {
    pub fn outcome(&self, kind: DurationKind) -> Option<&KindOutcome> {
        self.outcomes.iter().find(|o| o.kind == kind)
    }
}

#[derive(Debug)]
pub struct BdaReport {
    /// Shortest duration admitted to the fits.
    pub floor: f64,
    pub bins_per_decade: usize,
    pub thresholds: Vec<ThresholdReport>,
}

/// Sorted-sample quantiles `{0.45, 0.50, 0.55}` of the pooled values, then 0.
pub fn default_thresholds(segments: &[Series]) -> Vec<f64> {
    let mut v: Vec<f64> = segments
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .collect();
    if v.is_empty() {
        return vec![0.0];
    }
    v.sort_unstable_by(|a, b| a.total_cmp(b));
    let last = (v.len() - 1) as f64;
    let mut out: Vec<f64> = DEFAULT_QUANTILES
        .iter()
        .map(|&p| {
            let pos = p * last;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let w = pos - lo as f64;
            v[lo] * (1.0 - w) + v[hi] * w
        })
        .collect();
    out.push(0.0);
    out
}

/// `samples` times the median positive gap between consecutive sample
/// times, over all segments.
pub fn discreteness_floor(segments: &[Series], samples: f64) -> f64 {
    let mut gaps: Vec<f64> = segments
        .iter()
        .flat_map(|s| s.times.windows(2).map(|w| w[1] - w[0]))
        .filter(|&g| g > 0.0)
        .collect();
    if gaps.is_empty() {
        return 0.0;
    }
    let mid = gaps.len() / 2;
    let (_, m, _) = gaps.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    samples * *m
}

/// Floor, histogram, region search and fit for one duration multiset.
pub fn analyze_durations(
    kind: DurationKind,
    threshold: f64,
    durations: &[f64],
    floor: f64,
    bins_per_decade: usize,
) -> KindOutcome {
    let kept: Vec<f64> = durations.iter().copied().filter(|&d| d >= floor).collect();
    let excluded_short = durations.len() - kept.len();
    let result = (|| {
        let pdf = log_binned_pdf(&kept, bins_per_decade)?;
        let region = select_fit_region(&pdf)?;
        let fit = fit_powerlaw_region(&pdf, region.t_lo, region.t_hi)?;
        let hurst = hurst_from_bda(&fit);
        Ok(BdaFit {
            pdf,
            region,
            fit,
            hurst,
        })
    })();
    if let Err(e) = &result {
        tracing::warn!(
            threshold,
            kind = kind.label(),
            "duration analysis failed: {e}"
        );
    }
    KindOutcome {
        kind,
        threshold,
        n_durations: kept.len(),
        excluded_short,
        result,
    }
}

/// Passages, durations and fits for every threshold. Each segment is scanned
/// on its own, so no duration spans a segment boundary. Failures are kept
/// per threshold and kind; the other thresholds still run.
pub fn bda_pipeline(segments: &[Series], cfg: &BdaConfig) -> Result<BdaReport> {
    if cfg.thresholds.is_empty() {
        return Err(Error::InvalidArgument(
            "BDA needs at least one threshold".into(),
        ));
    }
    if segments.iter().all(|s| s.len() < 2) {
        return Err(Error::InsufficientData(
            "BDA needs a segment with at least 2 samples".into(),
        ));
    }
    let floor = discreteness_floor(segments, cfg.min_duration_samples);
    let thresholds = cfg
        .thresholds
        .par_iter()
        .map(|&h| {
            let mut bursts = Vec::new();
            let mut inter = Vec::new();
            let mut n_passages = 0;
            for seg in segments.iter().filter(|s| s.len() >= 2) {
                let c = threshold_passages(seg, h).expect("segment length checked");
                n_passages += c.times.len();
                let (b, i) = extract_durations(&c);
                bursts.extend(b.durations);
                inter.extend(i.durations);
            }
            let mut pooled = bursts.clone();
            pooled.extend_from_slice(&inter);
            let bpd = cfg.bins_per_decade;
            ThresholdReport {
                threshold: h,
                n_passages,
                outcomes: vec![
                    analyze_durations(DurationKind::Burst, h, &bursts, floor, bpd),
                    analyze_durations(DurationKind::Interburst, h, &inter, floor, bpd),
                    analyze_durations(DurationKind::Pooled, h, &pooled, floor, bpd),
                ],
            }
        })
        .collect();
    Ok(BdaReport {
        floor,
        bins_per_decade: cfg.bins_per_decade,
        thresholds,
    })
}
