//! Time-stamped series, uniform-grid series and the elementary transforms
//! shared by all estimators.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Clock used by a series: wall-clock seconds or event ticks (one tick per
/// order book state change).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeDomain {
    RealTimeSeconds,
    EventTicks,
}

impl TimeDomain {
    pub fn tag(self) -> u32 {
        match self {
            TimeDomain::RealTimeSeconds => 0,
            TimeDomain::EventTicks => 1,
        }
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(TimeDomain::RealTimeSeconds),
            1 => Some(TimeDomain::EventTicks),
            _ => None,
        }
    }

    /// Short label used in file names and reports.
    pub fn label(self) -> &'static str {
        match self {
            TimeDomain::RealTimeSeconds => "real",
            TimeDomain::EventTicks => "event",
        }
    }
}

/// Where a series came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesOrigin {
    pub symbol: String,
    /// Trading dates (or realization labels) contributing to the series.
    pub dates: Vec<String>,
    /// Free-form description of how the series was built.
    pub recipe: String,
    /// Index of the first point of each day after stitching. Always starts
    /// with 0 for a non-empty stitched series.
    pub day_starts: Vec<usize>,
}

impl SeriesOrigin {
    pub fn new(symbol: impl Into<String>, recipe: impl Into<String>) -> Self {
        SeriesOrigin {
            symbol: symbol.into(),
            recipe: recipe.into(),
            ..Default::default()
        }
    }
}

/// Ordered `(t, x)` pairs stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub domain: TimeDomain,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub origin: SeriesOrigin,
}

impl Series {
    pub fn new(domain: TimeDomain, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "series columns differ in length: {} times, {} values",
                times.len(),
                values.len()
            )));
        }
        Ok(Series {
            domain,
            times,
            values,
            origin: SeriesOrigin::default(),
        })
    }

    pub fn empty(domain: TimeDomain) -> Self {
        Series {
            domain,
            times: Vec::new(),
            values: Vec::new(),
            origin: SeriesOrigin::default(),
        }
    }

    pub fn with_origin(mut self, origin: SeriesOrigin) -> Self {
        self.origin = origin;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `t_last - t_first`, zero for fewer than two points.
    pub fn span(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Split along `origin.day_starts`. A series without day boundaries is
    /// returned as a single day.
    pub fn days(&self) -> Vec<Series> {
        let mut starts = self.origin.day_starts.clone();
        if starts.first() != Some(&0) {
            starts.insert(0, 0);
        }
        starts.retain(|&s| s < self.len());
        starts.dedup();
        let mut out = Vec::with_capacity(starts.len());
        for (k, &s) in starts.iter().enumerate() {
            let e = starts.get(k + 1).copied().unwrap_or(self.len());
            out.push(Series {
                domain: self.domain,
                times: self.times[s..e].to_vec(),
                values: self.values[s..e].to_vec(),
                origin: SeriesOrigin {
                    symbol: self.origin.symbol.clone(),
                    dates: self.origin.dates.get(k).cloned().into_iter().collect(),
                    recipe: self.origin.recipe.clone(),
                    day_starts: vec![0],
                },
            });
        }
        out
    }
}

/// Series on the implied grid `t_i = i * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSeries {
    pub step: f64,
    pub values: Vec<f64>,
    pub domain: TimeDomain,
}

impl UniformSeries {
    pub fn new(step: f64, values: Vec<f64>, domain: TimeDomain) -> Self {
        UniformSeries {
            step,
            values,
            domain,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn to_series(&self) -> Series {
        Series {
            domain: self.domain,
            times: (0..self.len()).map(|i| self.time(i)).collect(),
            values: self.values.clone(),
            origin: SeriesOrigin::default(),
        }
    }
}

/// Sample `series` on a grid of spacing `step` anchored at its first
/// observation, carrying the last observation forward. Grid points past the
/// last observation are not emitted.
pub fn resample_uniform(series: &Series, step: f64) -> Result<UniformSeries> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "resampling step must be positive, got {step}"
        )));
    }
    if series.is_empty() {
        return Err(Error::InsufficientData(
            "cannot resample an empty series".into(),
        ));
    }
    let t0 = series.times[0];
    let span = series.span();
    // tolerate a grid point landing a rounding error past the last sample
    let count = ((span / step) * (1.0 + 1e-12)).floor() as usize + 1;
    let mut values = Vec::with_capacity(count);
    let mut j = 0usize;
    let n = series.len();
    for i in 0..count {
        let t = t0 + i as f64 * step;
        while j + 1 < n && series.times[j + 1] <= t {
            j += 1;
        }
        values.push(series.values[j]);
    }
    Ok(UniformSeries {
        step,
        values,
        domain: series.domain,
    })
}

/// Mean-removed cumulative sum (the "profile" integrated before DFA).
pub fn cumulative_profile(u: &UniformSeries) -> UniformSeries {
    UniformSeries {
        step: u.step,
        values: profile(&u.values),
        domain: u.domain,
    }
}

pub(crate) fn profile(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let m = crate::fit::mean(values);
    let mut acc = 0.0;
    values
        .iter()
        .map(|&v| {
            acc += v - m;
            acc
        })
        .collect()
}

/// Re-index a series by event count: point `i` gets `t = i`.
pub fn to_event_time(series: &Series) -> Series {
    Series {
        domain: TimeDomain::EventTicks,
        times: (0..series.len()).map(|i| i as f64).collect(),
        values: series.values.clone(),
        origin: series.origin.clone(),
    }
}
