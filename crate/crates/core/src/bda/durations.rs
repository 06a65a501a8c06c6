use serde::{Deserialize, Serialize};

use crate::series::{Series, TimeDomain, UniformSeries};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Below,
    Above,
}

/// Passage instants of a series through one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSequence {
    pub threshold: f64,
    pub times: Vec<f64>,
    /// Side occupied before `times[0]`. For a series that never leaves the
    /// threshold this is `Below`.
    pub first_side: Side,
    pub domain: TimeDomain,
    pub series_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DurationKind {
    Burst,
    Interburst,
    /// Bursts and inter-bursts together.
    Pooled,
}

impl DurationKind {
    pub fn label(self) -> &'static str {
        match self {
            DurationKind::Burst => "burst",
            DurationKind::Interburst => "interburst",
            DurationKind::Pooled => "pooled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DurationSet {
    pub kind: DurationKind,
    pub durations: Vec<f64>,
    pub threshold: f64,
    pub domain: TimeDomain,
    pub series_len: usize,
}

fn scan(len: usize, time: impl Fn(usize) -> f64, values: &[f64], h: f64) -> (Vec<f64>, Side) {
    let mut side: Option<Side> = None;
    let mut first_side = None;
    let mut times = Vec::new();
    for (i, &x) in values.iter().enumerate().take(len) {
        let now = if x > h {
            Side::Above
        } else if x < h {
            Side::Below
        } else {
            continue;
        };
        match side {
            None => first_side = Some(now),
            Some(prev) if prev != now => times.push(time(i)),
            _ => {}
        }
        side = Some(now);
    }
    (times, first_side.unwrap_or(Side::Below))
}

/// Passages of `series` through `h`. A passage is stamped with the time of
/// the first sample observed on the new side; samples equal to `h` keep the
/// side of the sample before them.
pub fn threshold_passages(series: &Series, h: f64) -> Result<CrossingSequence> {
    if series.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "passage detection needs at least 2 samples, got {}",
            series.len()
        )));
    }
    let (times, first_side) = scan(series.len(), |i| series.times[i], &series.values, h);
    Ok(CrossingSequence {
        threshold: h,
        times,
        first_side,
        domain: series.domain,
        series_len: series.len(),
    })
}

/// [`threshold_passages`] on a uniform grid starting at time zero.
pub fn threshold_passages_uniform(u: &UniformSeries, h: f64) -> Result<CrossingSequence> {
    if u.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "passage detection needs at least 2 samples, got {}",
            u.len()
        )));
    }
    let (times, first_side) = scan(u.len(), |i| u.time(i), &u.values, h);
    Ok(CrossingSequence {
        threshold: h,
        times,
        first_side,
        domain: u.domain,
        series_len: u.len(),
    })
}

/// Bursts (up-passage to down-passage) and inter-bursts (down to up). The
/// open stretches before the first and after the last passage are dropped.
pub fn extract_durations(c: &CrossingSequence) -> (DurationSet, DurationSet) {
    let set = |kind| DurationSet {
        kind,
        durations: Vec::new(),
        threshold: c.threshold,
        domain: c.domain,
        series_len: c.series_len,
    };
    let mut bursts = set(DurationKind::Burst);
    let mut inter = set(DurationKind::Interburst);
    // the first passage leaves `first_side`
    let mut above = c.first_side == Side::Below;
    for w in c.times.windows(2) {
        let d = w[1] - w[0];
        if above {
            bursts.durations.push(d);
        } else {
            inter.durations.push(d);
        }
        above = !above;
    }
    (bursts, inter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(t: &[f64], x: &[f64]) -> Series {
        Series::new(TimeDomain::EventTicks, t.to_vec(), x.to_vec()).unwrap()
    }

    fn ticks(x: &[f64]) -> Series {
        series(&(0..x.len()).map(|i| i as f64).collect::<Vec<_>>(), x)
    }

    #[test]
    fn simple_burst() {
        let c = threshold_passages(&ticks(&[-1.0, 1.0, -1.0]), 0.0).unwrap();
        assert_eq!(c.times, vec![1.0, 2.0]);
        assert_eq!(c.first_side, Side::Below);
        let (b, i) = extract_durations(&c);
        assert_eq!(b.durations, vec![1.0]);
        assert!(i.durations.is_empty());
    }

    #[test]
    fn constant_has_no_passages() {
        let c = threshold_passages(&ticks(&[2.0; 10]), 0.0).unwrap();
        assert!(c.times.is_empty());
        let c = threshold_passages(&ticks(&[0.0; 10]), 0.0).unwrap();
        assert!(c.times.is_empty());
    }

    #[test]
    fn equality_keeps_previous_side() {
        let c = threshold_passages(&ticks(&[-1.0, 0.0, 0.0, 1.0]), 0.0).unwrap();
        assert_eq!(c.times, vec![3.0]);
        let c = threshold_passages(&ticks(&[0.0, 0.0, 1.0, 0.0, -1.0]), 0.0).unwrap();
        assert_eq!(c.times, vec![4.0]);
        assert_eq!(c.first_side, Side::Above);
    }

    #[test]
    fn durations_from_passages() {
        let c = CrossingSequence {
            threshold: 0.0,
            times: vec![1.0, 2.0, 5.0],
            first_side: Side::Below,
            domain: TimeDomain::RealTimeSeconds,
            series_len: 10,
        };
        let (b, i) = extract_durations(&c);
        assert_eq!(b.durations, vec![1.0]);
        assert_eq!(i.durations, vec![3.0]);
        let one = CrossingSequence {
            times: vec![4.0],
            ..c
        };
        let (b, i) = extract_durations(&one);
        assert!(b.durations.is_empty() && i.durations.is_empty());
    }

    #[test]
    fn short_series_rejected() {
        assert!(threshold_passages(&ticks(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn uniform_matches_general() {
        let v: Vec<f64> = (0..200)
            .map(|i| ((i * 13 % 29) as f64 - 14.0).sin())
            .collect();
        let u = UniformSeries::new(0.5, v, TimeDomain::RealTimeSeconds);
        let a = threshold_passages_uniform(&u, 0.1).unwrap();
        let b = threshold_passages(&u.to_series(), 0.1).unwrap();
        assert_eq!(a, b);
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    fn walk() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        prop::collection::vec((-3i32..=3, 1u32..5), 2..300).prop_map(|steps| {
            let mut t = 0.0;
            let mut x = 0.0;
            let mut ts = Vec::new();
            let mut xs = Vec::new();
            for (dx, dt) in steps {
                t += dt as f64;
                x += dx as f64 * 0.5;
                ts.push(t);
                xs.push(x);
            }
            (ts, xs)
        })
    }

    proptest! {
        #[test]
        fn monotone_transform_keeps_durations((t, x) in walk(), h in -2.0f64..2.0) {
            let base = extract_durations(&threshold_passages(&series(&t, &x), h).unwrap());
            let cubic = |v: f64| v * v * v + v;
            let gx: Vec<f64> = x.iter().map(|&v| cubic(v)).collect();
            let g = extract_durations(&threshold_passages(&series(&t, &gx), cubic(h)).unwrap());
            prop_assert_eq!(sorted(base.0.durations.clone()), sorted(g.0.durations));
            prop_assert_eq!(sorted(base.1.durations.clone()), sorted(g.1.durations));
            let ax: Vec<f64> = x.iter().map(|v| v.atan()).collect();
            let a = extract_durations(&threshold_passages(&series(&t, &ax), h.atan()).unwrap());
            prop_assert_eq!(sorted(base.0.durations), sorted(a.0.durations));
            prop_assert_eq!(sorted(base.1.durations), sorted(a.1.durations));
        }

        #[test]
        fn reflection_swaps_kinds((t, x) in walk(), h in -2.0f64..2.0) {
            let (b, i) = extract_durations(&threshold_passages(&series(&t, &x), h).unwrap());
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            let (rb, ri) = extract_durations(&threshold_passages(&series(&t, &neg), -h).unwrap());
            prop_assert_eq!(b.durations, ri.durations);
            prop_assert_eq!(i.durations, rb.durations);
        }

        #[test]
        fn telescoping_and_alternation((t, x) in walk(), h in -2.0f64..2.0) {
            let c = threshold_passages(&series(&t, &x), h).unwrap();
            let (b, i) = extract_durations(&c);
            prop_assert!(b.durations.len().abs_diff(i.durations.len()) <= 1);
            prop_assert!(b.durations.iter().chain(&i.durations).all(|&d| d > 0.0));
            prop_assert!(c.times.windows(2).all(|w| w[0] < w[1]));
            if c.times.len() >= 2 {
                // durations are differences of integers here, so the sum is exact
                let total: f64 = b.durations.iter().chain(&i.durations).sum();
                prop_assert_eq!(total, c.times[c.times.len() - 1] - c.times[0]);
            }
        }
    }
}
