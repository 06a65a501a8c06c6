//! `ingest`: LOBSTER files to stitched real-time and event-time caches.

use anyhow::{bail, Context, Result};
use lrm_core::lob::{
    dedup_last_per_time, discover_days, stitch_days, trim_day, DaySeries, LobsterDay,
};
use lrm_core::series::to_event_time;
use lrm_core::Series;
use rayon::prelude::*;
use tracing::{info, warn};

use crate::config::RunConfig;
use crate::manifest::{store, Manifest, SkippedInput};

/// Period label from the trading dates: the year, or `first-last` years.
pub fn period_label(dates: &[String]) -> String {
    let year = |d: &String| d.get(..4).unwrap_or(d.as_str()).to_string();
    match (dates.first(), dates.last()) {
        (Some(a), Some(b)) if year(a) != year(b) => format!("{}-{}", year(a), year(b)),
        (Some(a), _) => year(a),
        _ => "unknown".into(),
    }
}

struct LoadedDay {
    date: String,
    real: Series,
    event: Series,
    raw_events: usize,
    raw_span: f64,
}

fn load_day(day: &LobsterDay, epsilon: f64) -> Result<LoadedDay> {
    let d = DaySeries::load(day)?;
    for w in &d.warnings {
        warn!(date = %day.date, "{w}");
    }
    let real = trim_day(&dedup_last_per_time(&d.disbalance), epsilon)?;
    let event = to_event_time(&trim_day(&d.disbalance, epsilon)?);
    Ok(LoadedDay {
        date: d.date,
        real,
        event,
        raw_events: d.disbalance.len(),
        raw_span: d.disbalance.span(),
    })
}

pub fn run(cfg: &RunConfig) -> Result<Manifest> {
    let Some(data_dir) = &cfg.data_dir else {
        bail!("no data directory; pass --data-dir or set LRM_DATA_DIR");
    };
    if cfg.symbols.is_empty() {
        bail!("no symbols given; pass --symbols");
    }
    std::fs::create_dir_all(&cfg.out)
        .with_context(|| format!("cannot create {}", cfg.out.display()))?;
    let mut manifest = Manifest {
        source: "lobster".into(),
        ..Default::default()
    };
    for symbol in &cfg.symbols {
        let (days, orphans) = discover_days(data_dir, symbol, cfg.levels)?;
        for path in orphans {
            manifest.skipped.push(SkippedInput {
                symbol: symbol.clone(),
                item: path.display().to_string(),
                reason: "orderbook file missing".into(),
            });
        }
        let loaded: Vec<(String, Result<LoadedDay>)> = days
            .par_iter()
            .map(|d| (d.date.clone(), load_day(d, cfg.trim_epsilon)))
            .collect();
        let mut good = Vec::new();
        for (date, r) in loaded {
            match r {
                Ok(d) => good.push(d),
                Err(e) => {
                    warn!(symbol = %symbol, date = %date, "day skipped: {e}");
                    manifest.skipped.push(SkippedInput {
                        symbol: symbol.clone(),
                        item: date,
                        reason: e.to_string(),
                    });
                }
            }
        }
        if good.is_empty() {
            warn!(symbol = %symbol, "no usable days");
            continue;
        }
        let events: usize = good.iter().map(|d| d.raw_events).sum();
        let span: f64 = good.iter().map(|d| d.raw_span).sum();
        let nu = (span > 0.0).then(|| events as f64 / (span / 3600.0));
        let dates: Vec<String> = good.iter().map(|d| d.date.clone()).collect();
        let mut real_days = Vec::with_capacity(good.len());
        let mut event_days = Vec::with_capacity(good.len());
        for d in good {
            for (mut s, out) in [(d.real, &mut real_days), (d.event, &mut event_days)] {
                s.origin.symbol = symbol.clone();
                s.origin.dates = vec![d.date.clone()];
                out.push(s);
            }
        }
        let period = period_label(&dates);
        for days in [real_days, event_days] {
            let mut s = stitch_days(&days);
            s.origin.symbol = symbol.clone();
            let entry = store(&cfg.out, &s, &period, false, nu)?;
            info!(
                symbol = %symbol,
                domain = entry.domain.label(),
                days = entry.n_days,
                points = entry.n_points,
                "cached"
            );
            manifest.series.push(entry);
        }
    }
    if manifest.series.is_empty() {
        bail!(
            "no usable LOBSTER days for {} in {}",
            cfg.symbols.join(","),
            data_dir.display()
        );
    }
    manifest.write(&cfg.out)?;
    Ok(manifest)
}
