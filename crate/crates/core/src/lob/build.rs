use std::fs::File;
use std::path::Path;

use super::files::LobsterDay;
use super::message::{csv_error, csv_reader, EventKind, MessageParser};
use super::orderbook::{parse_depth_record, DepthRow};
use crate::series::{
    resample_uniform, to_event_time, Series, SeriesOrigin, TimeDomain, UniformSeries,
};
use crate::{Error, Result};

/// Tolerance for "dis-balance is close to zero" when trimming a day.
pub const DEFAULT_TRIM_EPSILON: f64 = 0.05;

/// Normalised volume imbalance over the recorded levels:
/// `(bid - ask) / (bid + ask)`, always in `[-1, 1]`.
pub fn compute_disbalance(row: &DepthRow) -> Result<f64> {
    let bid = row.bid_total();
    let ask = row.ask_total();
    let total = bid + ask;
    if total == 0 {
        return Err(Error::EmptyBook);
    }
    Ok((bid as f64 - ask as f64) / total as f64)
}

/// Dis-balance at every row with a non-empty book, timestamps untouched.
pub fn disbalance_points(rows: &[DepthRow]) -> Series {
    let mut times = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    for row in rows {
        if let Ok(x) = compute_disbalance(row) {
            times.push(row.time);
            values.push(x);
        }
    }
    Series {
        domain: TimeDomain::RealTimeSeconds,
        times,
        values,
        origin: SeriesOrigin::new("", "disbalance"),
    }
}

/// Collapse runs of identical timestamps to their last point.
pub fn dedup_last_per_time(series: &Series) -> Series {
    let n = series.len();
    let mut times = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        if i + 1 < n && series.times[i + 1] == series.times[i] {
            continue;
        }
        times.push(series.times[i]);
        values.push(series.values[i]);
    }
    Series {
        domain: series.domain,
        times,
        values,
        origin: series.origin.clone(),
    }
}

/// Real-time dis-balance series: one point per distinct timestamp holding
/// the book state after all simultaneous updates.
pub fn build_disbalance_series(rows: &[DepthRow]) -> Series {
    dedup_last_per_time(&disbalance_points(rows))
}

/// Event-time dis-balance series: every book change is one tick.
pub fn build_event_series(rows: &[DepthRow]) -> Series {
    to_event_time(&disbalance_points(rows))
}

/// Drop the prefix before the first and the suffix after the last point with
/// `|x| <= epsilon`.
pub fn trim_day(series: &Series, epsilon: f64) -> Result<Series> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "trim epsilon must be positive, got {epsilon}"
        )));
    }
    let near = |x: &f64| x.abs() <= epsilon;
    let first = series.values.iter().position(near);
    let last = series.values.iter().rposition(near);
    let (Some(a), Some(b)) = (first, last) else {
        return Err(Error::NeverNearZero { epsilon });
    };
    Ok(Series {
        domain: series.domain,
        times: series.times[a..=b].to_vec(),
        values: series.values[a..=b].to_vec(),
        origin: series.origin.clone(),
    })
}

/// Concatenate trimmed daily series into one continuing series.
///
/// Real-time days after the first are shifted so each starts one median
/// inter-event gap after the previous day ended; event-time days are
/// renumbered consecutively. Day starts are recorded in the origin.
pub fn stitch_days(days: &[Series]) -> Series {
    let Some(first) = days.first() else {
        return Series::empty(TimeDomain::RealTimeSeconds);
    };
    let domain = first.domain;
    let total: usize = days.iter().map(Series::len).sum();
    let mut out = Series {
        domain,
        times: Vec::with_capacity(total),
        values: Vec::with_capacity(total),
        origin: SeriesOrigin {
            symbol: first.origin.symbol.clone(),
            recipe: first.origin.recipe.clone(),
            ..Default::default()
        },
    };
    let gap = match domain {
        TimeDomain::EventTicks => 1.0,
        TimeDomain::RealTimeSeconds => {
            let gaps: Vec<f64> = days
                .iter()
                .flat_map(|d| d.times.windows(2).map(|w| w[1] - w[0]))
                .filter(|g| *g > 0.0)
                .collect();
            crate::fit::median(&gaps).unwrap_or(1.0)
        }
    };
    for day in days.iter().filter(|d| !d.is_empty()) {
        out.origin.day_starts.push(out.len());
        out.origin.dates.extend(day.origin.dates.iter().cloned());
        match domain {
            TimeDomain::EventTicks => {
                let base = out.len();
                out.times.extend((0..day.len()).map(|i| (base + i) as f64));
            }
            TimeDomain::RealTimeSeconds => {
                let shift = match out.times.last() {
                    None => 0.0,
                    Some(&end) => end + gap - day.times[0],
                };
                out.times.extend(day.times.iter().map(|t| t + shift));
            }
        }
        out.values.extend_from_slice(&day.values);
    }
    out
}

/// Events per hour over the series span.
pub fn flow_intensity(series: &Series) -> Result<f64> {
    let span = series.span();
    if !(span > 0.0) {
        return Err(Error::InsufficientData(
            "flow intensity needs a series spanning more than 0 s".into(),
        ));
    }
    Ok(series.len() as f64 / (span / 3600.0))
}

/// Mid-price `(best ask + best bid) / 2` at every row where both sides of
/// the first level are occupied.
pub fn midprice_points(rows: &[DepthRow]) -> Series {
    let mut times = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    for row in rows {
        if let Some((bid, ask)) = row.best_quotes() {
            times.push(row.time);
            values.push(0.5 * (bid as f64 + ask as f64));
        }
    }
    Series {
        domain: TimeDomain::RealTimeSeconds,
        times,
        values,
        origin: SeriesOrigin::new("", "midprice"),
    }
}

/// Absolute log returns of the mid-price on a uniform grid of `step`
/// seconds (real time) or ticks (event time).
pub fn midprice_return_series(
    rows: &[DepthRow],
    step: f64,
    domain: TimeDomain,
) -> Result<UniformSeries> {
    let raw = midprice_points(rows);
    let series = match domain {
        TimeDomain::RealTimeSeconds => dedup_last_per_time(&raw),
        TimeDomain::EventTicks => to_event_time(&raw),
    };
    absolute_log_returns(&series, step)
}

pub(crate) fn absolute_log_returns(series: &Series, step: f64) -> Result<UniformSeries> {
    if series.is_empty() {
        return Err(Error::InsufficientData("no quoted mid-prices".into()));
    }
    let grid = resample_uniform(series, step)?;
    if grid.len() < 2 {
        return Err(Error::InsufficientData(
            "mid-price grid has fewer than 2 points".into(),
        ));
    }
    let values = grid
        .values
        .windows(2)
        .map(|w| (w[1].ln() - w[0].ln()).abs())
        .collect();
    Ok(UniformSeries::new(step, values, grid.domain))
}

/// Raw per-day series reconstructed from one LOBSTER file pair.
#[derive(Debug, Clone)]
pub struct DaySeries {
    pub date: String,
    /// Dis-balance at every non-halt row with a non-empty book.
    pub disbalance: Series,
    /// Mid-price at every non-halt row with both best quotes.
    pub midprice: Series,
    pub message_rows: usize,
    pub orderbook_rows: usize,
    pub warnings: Vec<String>,
}

impl DaySeries {
    /// Stream both files of a day in lockstep without materialising the book.
    pub fn load(day: &LobsterDay) -> Result<Self> {
        let m_label = day.message_path.display().to_string();
        let o_label = day.orderbook_path.display().to_string();
        let mut mrdr = csv_reader(open(&day.message_path)?);
        let mut ordr = csv_reader(open(&day.orderbook_path)?);
        let mut parser = MessageParser::new(&m_label);
        let mut mrec = csv::StringRecord::new();
        let mut orec = csv::StringRecord::new();
        let mut warnings = Vec::new();
        let mut disb = (Vec::new(), Vec::new());
        let mut mid = (Vec::new(), Vec::new());
        let (mut m_rows, mut o_rows) = (0usize, 0usize);
        loop {
            let has_m = mrdr
                .read_record(&mut mrec)
                .map_err(|e| csv_error(&m_label, e))?;
            let has_o = ordr
                .read_record(&mut orec)
                .map_err(|e| csv_error(&o_label, e))?;
            m_rows += has_m as usize;
            o_rows += has_o as usize;
            if !(has_m && has_o) {
                if has_m || has_o {
                    // count the remainder for the error message
                    let rest_m = mrdr.records().count();
                    let rest_o = ordr.records().count();
                    return Err(Error::InvalidArgument(format!(
                        "{}: message file has {} rows but orderbook file has {}",
                        day.date,
                        m_rows + rest_m,
                        o_rows + rest_o
                    )));
                }
                break;
            }
            let line = mrec.position().map_or(0, |p| p.line());
            let ev = parser.parse(&mrec, line, &mut warnings)?;
            let oline = orec.position().map_or(0, |p| p.line());
            let mut row = parse_depth_record(&orec, day.levels, &o_label, oline)?;
            if ev.kind == EventKind::TradingHalt {
                continue;
            }
            row.time = ev.time;
            if let Ok(x) = compute_disbalance(&row) {
                disb.0.push(row.time);
                disb.1.push(x);
            }
            if let Some((bid, ask)) = row.best_quotes() {
                mid.0.push(row.time);
                mid.1.push(0.5 * (bid as f64 + ask as f64));
            }
        }
        let origin = |recipe: &str| SeriesOrigin {
            symbol: day.symbol.clone(),
            dates: vec![day.date.clone()],
            recipe: recipe.to_string(),
            day_starts: vec![0],
        };
        Ok(DaySeries {
            date: day.date.clone(),
            disbalance: Series {
                domain: TimeDomain::RealTimeSeconds,
                times: disb.0,
                values: disb.1,
                origin: origin("disbalance"),
            },
            midprice: Series {
                domain: TimeDomain::RealTimeSeconds,
                times: mid.0,
                values: mid.1,
                origin: origin("midprice"),
            },
            message_rows: m_rows,
            orderbook_rows: o_rows,
            warnings,
        })
    }

    pub fn real_time(&self) -> Series {
        dedup_last_per_time(&self.disbalance)
    }

    pub fn event_time(&self) -> Series {
        to_event_time(&self.disbalance)
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::super::orderbook::Level;
    use super::*;

    fn row(time: f64, bids: &[u64], asks: &[u64]) -> DepthRow {
        let levels = bids
            .iter()
            .zip(asks)
            .enumerate()
            .map(|(k, (&b, &a))| Level {
                ask_price: 100 + k as i64,
                ask_volume: a,
                bid_price: 99 - k as i64,
                bid_volume: b,
            })
            .collect();
        DepthRow { time, levels }
    }

    fn series(t: &[f64], x: &[f64]) -> Series {
        Series::new(TimeDomain::RealTimeSeconds, t.to_vec(), x.to_vec()).unwrap()
    }

    #[test]
    fn disbalance_examples() {
        assert_eq!(
            compute_disbalance(&row(0.0, &[4, 2], &[1, 1])).unwrap(),
            0.5
        );
        assert_eq!(
            compute_disbalance(&row(0.0, &[3, 5], &[3, 5])).unwrap(),
            0.0
        );
        assert_eq!(
            compute_disbalance(&row(0.0, &[3, 5], &[0, 0])).unwrap(),
            1.0
        );
        assert!(matches!(
            compute_disbalance(&row(0.0, &[0, 0], &[0, 0])),
            Err(Error::EmptyBook)
        ));
    }

    #[test]
    fn series_one_point_per_row() {
        let rows = [
            row(1.0, &[1], &[1]),
            row(2.0, &[2], &[1]),
            row(3.0, &[1], &[2]),
        ];
        assert_eq!(build_disbalance_series(&rows).len(), 3);
    }

    #[test]
    fn simultaneous_rows_collapse_to_last() {
        let rows = [row(1.0, &[1], &[1]), row(1.0, &[3], &[1])];
        let s = build_disbalance_series(&rows);
        assert_eq!(s.times, vec![1.0]);
        assert_eq!(s.values, vec![0.5]);
        // event time keeps both
        assert_eq!(build_event_series(&rows).values, vec![0.0, 0.5]);
    }

    #[test]
    fn empty_books_are_skipped() {
        let rows = [row(1.0, &[0], &[0]), row(2.0, &[1], &[0])];
        let s = build_disbalance_series(&rows);
        assert_eq!(s.times, vec![2.0]);
        assert!(build_disbalance_series(&[]).is_empty());
    }

    #[test]
    fn trim_examples() {
        let s = series(&[0., 1., 2., 3., 4.], &[0.4, 0.03, 0.5, -0.02, 0.6]);
        let t = trim_day(&s, 0.05).unwrap();
        assert_eq!(t.values, vec![0.03, 0.5, -0.02]);
        assert_eq!(t.times, vec![1.0, 2.0, 3.0]);

        let z = series(&[0., 1., 2.], &[0.0, 0.7, 0.0]);
        assert_eq!(trim_day(&z, 0.05).unwrap(), z);

        let far = series(&[0., 1.], &[0.9, 0.8]);
        assert!(matches!(
            trim_day(&far, 0.05),
            Err(Error::NeverNearZero { .. })
        ));
        assert!(trim_day(&z, 0.0).is_err());
    }

    #[test]
    fn stitch_two_single_point_days() {
        let a = series(&[100.0], &[0.0]);
        let b = series(&[50.0], &[0.01]);
        let s = stitch_days(&[a, b]);
        assert_eq!(s.len(), 2);
        assert!(s.times[1] > s.times[0]);
        assert_eq!(s.origin.day_starts, vec![0, 1]);
    }

    #[test]
    fn stitch_rebases_with_median_gap() {
        let a = series(&[10.0, 11.0, 13.0], &[0.0, 0.1, 0.0]);
        let b = series(&[5.0, 6.0], &[0.0, 0.02]);
        let s = stitch_days(&[a.clone(), b]);
        // gaps: 1, 2, 1 -> median 1
        assert_eq!(s.times, vec![10.0, 11.0, 13.0, 14.0, 15.0]);
        assert_eq!(s.values, vec![0.0, 0.1, 0.0, 0.0, 0.02]);
        let single = stitch_days(std::slice::from_ref(&a));
        assert_eq!(single.times, a.times);
        assert_eq!(single.values, a.values);
        assert!(stitch_days(&[]).is_empty());
    }

    #[test]
    fn stitch_event_days() {
        let a = to_event_time(&series(&[1.0, 2.0], &[0.0, 0.1]));
        let b = to_event_time(&series(&[7.0, 8.0, 9.0], &[0.0, 0.2, 0.0]));
        let s = stitch_days(&[a, b]);
        assert_eq!(s.times, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.domain, TimeDomain::EventTicks);
    }

    #[test]
    fn intensity() {
        let times: Vec<f64> = (0..3600).map(|i| i as f64 * 3600.0 / 3599.0).collect();
        let s = series(&times, &vec![0.0; 3600]);
        assert!((flow_intensity(&s).unwrap() - 3600.0).abs() < 1e-9);
        assert!(flow_intensity(&series(&[5.0, 5.0], &[0.0, 0.0])).is_err());
    }

    #[test]
    fn midprice_returns() {
        let flat: Vec<DepthRow> = (0..5).map(|i| row(i as f64, &[1], &[1])).collect();
        let r = midprice_return_series(&flat, 1.0, TimeDomain::RealTimeSeconds).unwrap();
        assert_eq!(r.values, vec![0.0; 4]);

        let mut a = row(0.0, &[1], &[1]);
        a.levels[0].bid_price = 99;
        a.levels[0].ask_price = 101;
        let mut b = row(1.0, &[1], &[1]);
        b.levels[0].bid_price = 199;
        b.levels[0].ask_price = 201;
        let r = midprice_return_series(&[a.clone(), b], 1.0, TimeDomain::RealTimeSeconds).unwrap();
        assert!((r.values[0] - 2f64.ln()).abs() < 1e-12);

        assert!(midprice_return_series(&[a], 1.0, TimeDomain::RealTimeSeconds).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn antisymmetric_and_bounded(
                bids in prop::collection::vec(0u64..10_000, 1..10),
                asks in prop::collection::vec(0u64..10_000, 10),
            ) {
                let asks = &asks[..bids.len()];
                let r = row(0.0, &bids, asks);
                let swapped = row(0.0, asks, &bids);
                match compute_disbalance(&r) {
                    Ok(x) => {
                        prop_assert!((-1.0..=1.0).contains(&x));
                        prop_assert_eq!(compute_disbalance(&swapped).unwrap(), -x);
                    }
                    Err(_) => prop_assert!(compute_disbalance(&swapped).is_err()),
                }
            }

            #[test]
            fn stitch_preserves_length_and_order(
                lens in prop::collection::vec(1usize..20, 1..6),
            ) {
                let days: Vec<Series> = lens.iter().enumerate().map(|(d, &n)| {
                    let t: Vec<f64> = (0..n).map(|i| 1000.0 * d as f64 + i as f64 * 0.5).collect();
                    series(&t, &vec![0.0; n])
                }).collect();
                let s = stitch_days(&days);
                prop_assert_eq!(s.len(), lens.iter().sum::<usize>());
                prop_assert!(s.times.windows(2).all(|w| w[0] < w[1]));
            }

            #[test]
            fn event_time_keeps_values(vals in prop::collection::vec(-1.0f64..1.0, 0..50)) {
                let t: Vec<f64> = (0..vals.len()).map(|i| i as f64 * 0.3).collect();
                let s = series(&t, &vals);
                prop_assert_eq!(to_event_time(&s).values, vals);
            }
        }
    }
}
