//! `analyze`: the four estimators over every cached series, with curve
//! CSVs, per-series fit JSON and the summary tables.

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use lrm_core::bda::{bda_pipeline, default_thresholds, BdaConfig, BdaReport, DurationKind};
use lrm_core::estimators::{
    average_daily_psd, default_window_sizes, fit_two_regime_psd, frequency_grid, generalized_hurst,
    hurst_from_psd, mfdfa, rescaled_range, GeneralizedHurst, MfdfaSurface, PsdEstimate, RsCurve,
    TwoRegimeFit, DEFAULT_GRID_POINTS, DEFAULT_Q_VALUES,
};
use lrm_core::series::resample_uniform;
use lrm_core::{Series, TimeDomain};
use serde::{Deserialize, Serialize};
use tracing::{info, warn};

use crate::config::RunConfig;
use crate::manifest::{Manifest, SeriesEntry};
use crate::output::{num, write_csv, write_json};

pub const REPORTS_FILE: &str = "hurst_reports.json";

/// One Hurst estimate, the unit collected by `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstRecord {
    pub method: String,
    pub symbol: String,
    pub period: String,
    pub domain: TimeDomain,
    /// Resampling step for R/S and DFA, threshold for BDA.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub hurst: f64,
    pub stderr: Option<f64>,
}

#[derive(Debug, Default)]
pub struct AnalyzeSummary {
    pub records: Vec<HurstRecord>,
    /// `(series stem, estimator, message)` for every failed estimate.
    pub failures: Vec<(String, String, String)>,
}

#[derive(Serialize)]
struct PsdJson {
    n_days_averaged: usize,
    fit: TwoRegimeFit,
    hurst: f64,
}

#[derive(Serialize)]
struct RsJson {
    tau: f64,
    n_points: usize,
    curve: RsCurve,
}

#[derive(Serialize)]
struct DfaJson {
    tau: f64,
    n_points: usize,
    zero_boxes: usize,
    generalized_hurst: Vec<GeneralizedHurst>,
}

#[derive(Serialize)]
struct BdaKindJson {
    kind: DurationKind,
    n_durations: usize,
    excluded_short: usize,
    gamma: Option<f64>,
    gamma_stderr: Option<f64>,
    r2: Option<f64>,
    t_lo: Option<f64>,
    t_hi: Option<f64>,
    fallback_region: Option<bool>,
    hurst: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct BdaThresholdJson {
    threshold: f64,
    n_passages: usize,
    kinds: Vec<BdaKindJson>,
}

#[derive(Serialize)]
struct BdaJson {
    floor: f64,
    bins_per_decade: usize,
    primary_threshold: f64,
    thresholds: Vec<BdaThresholdJson>,
}

#[derive(Serialize, Default)]
struct FitsJson {
    symbol: String,
    period: String,
    domain: String,
    n_points: usize,
    n_days: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    flow_intensity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psd: Option<PsdJson>,
    rs: Vec<RsJson>,
    dfa: Vec<DfaJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bda: Option<BdaJson>,
    errors: Vec<String>,
}

/// Rows of the three summary tables, gathered across series.
#[derive(Default)]
struct Tables {
    t1: Vec<Vec<String>>,
    t2: Vec<Vec<String>>,
    t3: Vec<Vec<String>>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn demeaned(day: &Series) -> Series {
    let m = day.values.iter().sum::<f64>() / day.len().max(1) as f64;
    let mut d = day.clone();
    d.values.iter_mut().for_each(|v| *v -= m);
    d
}

/// Daily-average periodogram on a grid from the median day span up to half
/// the mean sampling rate.
fn run_psd(days: &[Series]) -> Result<PsdEstimate> {
    let usable: Vec<Series> = days
        .iter()
        .filter(|d| d.len() >= 2 && d.span() > 0.0)
        .map(demeaned)
        .collect();
    if usable.is_empty() {
        return Err(anyhow!("no day with a positive time span"));
    }
    let span = median(usable.iter().map(Series::span).collect());
    let points: usize = usable.iter().map(Series::len).sum();
    let total_span: f64 = usable.iter().map(Series::span).sum();
    let grid = frequency_grid(span, points as f64 / total_span, DEFAULT_GRID_POINTS)?;
    let mut psd = average_daily_psd(&usable, &grid)?;
    psd.fit = Some(fit_two_regime_psd(&psd)?);
    Ok(psd)
}

fn median_gap(s: &Series) -> f64 {
    let gaps: Vec<f64> = s
        .times
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 0.0)
        .collect();
    if gaps.is_empty() {
        1.0
    } else {
        median(gaps)
    }
}

fn taus_for(cfg: &RunConfig, manifest: &Manifest, series: &Series) -> Vec<f64> {
    // synthetic series are analysed on their own sampling grid
    if manifest.source == "synth" {
        return vec![median_gap(series)];
    }
    match series.domain {
        TimeDomain::RealTimeSeconds => cfg.tau_real_seconds.clone(),
        TimeDomain::EventTicks => cfg.tau_event_ticks.clone(),
    }
}

fn tau_tag(tau: f64) -> String {
    format!("{tau}").replace('.', "p")
}

fn psd_rows(psd: &PsdEstimate) -> Vec<Vec<String>> {
    psd.frequencies
        .iter()
        .zip(&psd.power)
        .map(|(f, p)| vec![num(*f), num(*p)])
        .collect()
}

fn mfdfa_csv(path: &Path, surface: &MfdfaSurface) -> Result<()> {
    let mut header = String::from("n");
    for q in &surface.q_values {
        header.push_str(&format!(",F_q{q}"));
    }
    let rows: Vec<Vec<String>> = surface
        .n_values
        .iter()
        .enumerate()
        .map(|(j, n)| {
            let mut row = vec![n.to_string()];
            row.extend(surface.f.iter().map(|col| num(col[j])));
            row
        })
        .collect();
    write_csv(path, &header, &rows)
}

fn bda_csv(path: &Path, report: &BdaReport) -> Result<()> {
    let mut rows = Vec::new();
    for t in &report.thresholds {
        for o in &t.outcomes {
            let Ok(fit) = &o.result else { continue };
            let centers = fit.pdf.centers();
            for (b, c) in centers.iter().enumerate() {
                rows.push(vec![
                    num(t.threshold),
                    o.kind.label().to_string(),
                    num(fit.pdf.bin_edges[b]),
                    num(fit.pdf.bin_edges[b + 1]),
                    num(*c),
                    fit.pdf.counts[b].to_string(),
                    num(fit.pdf.densities[b]),
                ]);
            }
        }
    }
    write_csv(
        path,
        "threshold,kind,bin_lo,bin_hi,center,count,density",
        &rows,
    )
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    manifest: &'a Manifest,
    out: &'a Path,
}

fn analyze_entry(
    ctx: &Ctx,
    entry: &SeriesEntry,
    tables: &mut Tables,
    summary: &mut AnalyzeSummary,
) -> Result<()> {
    let series = entry.load(ctx.out)?;
    let stem = entry.stem();
    let domain = entry.domain.label().to_string();
    let key = [entry.symbol.clone(), entry.period.clone(), domain.clone()];
    let mut fits = FitsJson {
        symbol: entry.symbol.clone(),
        period: entry.period.clone(),
        domain: domain.clone(),
        n_points: series.len(),
        n_days: entry.n_days,
        flow_intensity: entry.flow_intensity,
        ..Default::default()
    };
    let record = |method: &str, tau, threshold, hurst, stderr| HurstRecord {
        method: method.to_string(),
        symbol: entry.symbol.clone(),
        period: entry.period.clone(),
        domain: entry.domain,
        tau,
        threshold,
        hurst,
        stderr,
    };
    let mut fail = |fits: &mut FitsJson, what: &str, e: String| {
        warn!(series = %stem, estimator = what, "{e}");
        fits.errors.push(format!("{what}: {e}"));
        summary.failures.push((stem.clone(), what.to_string(), e));
    };
    let days = series.days();
    let est = ctx.cfg.estimators;

    if est.psd {
        match run_psd(&days) {
            Ok(psd) => {
                let fit = psd.fit.expect("fit attached");
                let h = hurst_from_psd(fit.beta_low);
                write_csv(
                    &ctx.out.join(format!("psd_{stem}.csv")),
                    "frequency,power",
                    &psd_rows(&psd),
                )?;
                let mut row = key.to_vec();
                row.extend([
                    num(fit.beta_low),
                    num(fit.beta_high),
                    num(fit.f_break),
                    num(h),
                ]);
                tables.t1.push(row);
                summary
                    .records
                    .push(record("psd", None, None, h, Some(0.5 * fit.stderr_low)));
                fits.psd = Some(PsdJson {
                    n_days_averaged: psd.n_days_averaged,
                    fit,
                    hurst: h,
                });
            }
            Err(e) => fail(&mut fits, "psd", e.to_string()),
        }
    }

    if est.rs || est.dfa {
        for tau in taus_for(ctx.cfg, ctx.manifest, &series) {
            let u = match resample_uniform(&series, tau) {
                Ok(u) => u,
                Err(e) => {
                    fail(&mut fits, "resample", format!("tau {tau}: {e}"));
                    continue;
                }
            };
            let windows = default_window_sizes(u.len());
            let tag = tau_tag(tau);
            let mut rs_cols = (String::new(), String::new());
            if est.rs {
                match rescaled_range(&u, &windows) {
                    Ok(c) => {
                        let rows: Vec<Vec<String>> = c
                            .n_values
                            .iter()
                            .zip(&c.rs_means)
                            .map(|(n, r)| vec![n.to_string(), num(*r)])
                            .collect();
                        write_csv(
                            &ctx.out.join(format!("rs_{stem}_tau{tag}.csv")),
                            "n,rs",
                            &rows,
                        )?;
                        rs_cols = (num(c.hurst), num(c.slope_stderr));
                        summary.records.push(record(
                            "rs",
                            Some(tau),
                            None,
                            c.hurst,
                            Some(c.slope_stderr),
                        ));
                        fits.rs.push(RsJson {
                            tau,
                            n_points: u.len(),
                            curve: c,
                        });
                    }
                    Err(e) => fail(&mut fits, "rs", format!("tau {tau}: {e}")),
                }
            }
            let mut dfa_cols = (String::new(), String::new());
            if est.dfa {
                let res = mfdfa(&u, &windows, &DEFAULT_Q_VALUES).and_then(|s| {
                    let gh = generalized_hurst(&s)?;
                    Ok((s, gh))
                });
                match res {
                    Ok((surface, gh)) => {
                        mfdfa_csv(
                            &ctx.out.join(format!("mfdfa_{stem}_tau{tag}.csv")),
                            &surface,
                        )?;
                        if let Some(h2) = gh.iter().find(|g| g.q == 2.0) {
                            if let Some(h) = h2.hurst {
                                dfa_cols = (num(h), opt(h2.stderr));
                                summary
                                    .records
                                    .push(record("dfa", Some(tau), None, h, h2.stderr));
                            } else {
                                fail(&mut fits, "dfa", format!("tau {tau}: degenerate F_2"));
                            }
                        }
                        fits.dfa.push(DfaJson {
                            tau,
                            n_points: u.len(),
                            zero_boxes: surface.zero_boxes,
                            generalized_hurst: gh,
                        });
                    }
                    Err(e) => fail(&mut fits, "dfa", format!("tau {tau}: {e}")),
                }
            }
            let mut row = key.to_vec();
            row.extend([num(tau), rs_cols.0, rs_cols.1, dfa_cols.0, dfa_cols.1]);
            tables.t2.push(row);
        }
    }

    if est.bda {
        let segments = if entry.independent_segments {
            days
        } else {
            vec![series.clone()]
        };
        let (thresholds, primary) = match &ctx.cfg.thresholds {
            Some(t) => (t.clone(), t[0]),
            None => {
                let t = default_thresholds(&segments);
                // the series median
                let m = t[1];
                (t, m)
            }
        };
        let mut bcfg = BdaConfig::new(thresholds);
        bcfg.bins_per_decade = ctx.cfg.bins_per_decade;
        match bda_pipeline(&segments, &bcfg) {
            Ok(report) => {
                bda_csv(&ctx.out.join(format!("bda_{stem}.csv")), &report)?;
                let mut tj = Vec::new();
                for t in &report.thresholds {
                    let mut kinds = Vec::new();
                    for o in &t.outcomes {
                        let ok = o.result.as_ref().ok();
                        kinds.push(BdaKindJson {
                            kind: o.kind,
                            n_durations: o.n_durations,
                            excluded_short: o.excluded_short,
                            gamma: ok.map(|f| f.fit.gamma),
                            gamma_stderr: ok.map(|f| f.fit.stderr),
                            r2: ok.map(|f| f.fit.r2),
                            t_lo: ok.map(|f| f.fit.t_lo),
                            t_hi: ok.map(|f| f.fit.t_hi),
                            fallback_region: ok.map(|f| f.region.fallback),
                            hurst: ok.map(|f| f.hurst),
                            error: o.result.as_ref().err().map(|e| e.to_string()),
                        });
                    }
                    tj.push(BdaThresholdJson {
                        threshold: t.threshold,
                        n_passages: t.n_passages,
                        kinds,
                    });
                    let pooled = t
                        .outcome(DurationKind::Pooled)
                        .expect("pooled kind reported");
                    let mut row = key.to_vec();
                    row.push(num(t.threshold));
                    match &pooled.result {
                        Ok(f) => {
                            row.extend([
                                num(f.fit.gamma),
                                num(f.fit.stderr),
                                num(f.hurst),
                                num(f.fit.t_lo),
                                num(f.fit.t_hi),
                            ]);
                            if t.threshold == primary {
                                summary.records.push(record(
                                    "bda",
                                    None,
                                    Some(t.threshold),
                                    f.hurst,
                                    Some(f.fit.stderr),
                                ));
                            }
                        }
                        Err(e) => {
                            row.extend(std::iter::repeat_n(String::new(), 5));
                            fail(&mut fits, "bda", format!("threshold {}: {e}", t.threshold));
                        }
                    }
                    row.push(pooled.n_durations.to_string());
                    tables.t3.push(row);
                }
                fits.bda = Some(BdaJson {
                    floor: report.floor,
                    bins_per_decade: report.bins_per_decade,
                    primary_threshold: primary,
                    thresholds: tj,
                });
            }
            Err(e) => fail(&mut fits, "bda", e.to_string()),
        }
    }

    write_json(&ctx.out.join(format!("fits_{stem}.json")), &fits)?;
    info!(series = %stem, errors = fits.errors.len(), "analysed");
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<AnalyzeSummary> {
    let manifest = Manifest::read(&cfg.out)?;
    if manifest.series.is_empty() {
        return Err(anyhow!("manifest lists no series"));
    }
    let ctx = Ctx {
        cfg,
        manifest: &manifest,
        out: &cfg.out,
    };
    let mut tables = Tables::default();
    let mut summary = AnalyzeSummary::default();
    for entry in &manifest.series {
        analyze_entry(&ctx, entry, &mut tables, &mut summary)
            .with_context(|| format!("analysing {}", entry.stem()))?;
    }
    let out = &cfg.out;
    if cfg.estimators.psd {
        write_csv(
            &out.join("table1.csv"),
            "symbol,period,domain,beta1,beta2,f_break,H_psd",
            &tables.t1,
        )?;
    }
    if cfg.estimators.rs || cfg.estimators.dfa {
        write_csv(
            &out.join("table2.csv"),
            "symbol,period,domain,tau,H_rs,H_rs_stderr,H2_dfa,H2_dfa_stderr",
            &tables.t2,
        )?;
    }
    if cfg.estimators.bda {
        write_csv(
            &out.join("table3.csv"),
            "symbol,period,domain,threshold,gamma2,gamma2_stderr,H_bda,T_lo,T_hi,n_durations",
            &tables.t3,
        )?;
    }
    write_json(&out.join(REPORTS_FILE), &summary.records)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn tau_tags() {
        assert_eq!(tau_tag(200.0), "200");
        assert_eq!(tau_tag(0.5), "0p5");
    }
}
