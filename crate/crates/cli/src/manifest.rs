//! `manifest.json`: the index of cached series written by `ingest` and
//! `synth` and read by `analyze`.

use std::path::Path;

use anyhow::{Context, Result};
use lrm_core::{cache, Series, TimeDomain};
use serde::{Deserialize, Serialize};

use crate::output::write_json;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub symbol: String,
    pub period: String,
    pub domain: TimeDomain,
    /// Cache file name relative to the output directory.
    pub file: String,
    pub n_days: usize,
    pub n_points: usize,
    pub dates: Vec<String>,
    pub day_starts: Vec<usize>,
    /// Days are unrelated realizations; duration analysis must not join them.
    pub independent_segments: bool,
    /// Events per hour over the raw (untrimmed) days.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow_intensity: Option<f64>,
}

impl SeriesEntry {
    pub fn stem(&self) -> String {
        format!("{}_{}_{}", self.symbol, self.period, self.domain.label())
    }

    /// Load the cached series and restore its day boundaries.
    pub fn load(&self, dir: &Path) -> Result<Series> {
        let mut s = cache::load(&dir.join(&self.file))
            .with_context(|| format!("cannot load cached series {}", self.file))?;
        s.origin.symbol = self.symbol.clone();
        s.origin.dates = self.dates.clone();
        s.origin.day_starts = self.day_starts.clone();
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedInput {
    pub symbol: String,
    pub item: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub source: String,
    pub series: Vec<SeriesEntry>,
    pub skipped: Vec<SkippedInput>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).with_context(|| {
            format!(
                "cannot read {}; run `ingest` or `synth` first",
                path.display()
            )
        })?;
        serde_json::from_str(&text).with_context(|| format!("malformed {}", path.display()))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join(MANIFEST_FILE), self)
    }
}

/// Cache a series under `<stem>.lrm` and describe it.
pub fn store(
    dir: &Path,
    series: &Series,
    period: &str,
    independent_segments: bool,
    flow_intensity: Option<f64>,
) -> Result<SeriesEntry> {
    let mut entry = SeriesEntry {
        symbol: series.origin.symbol.clone(),
        period: period.to_string(),
        domain: series.domain,
        file: String::new(),
        n_days: series.origin.day_starts.len().max(1),
        n_points: series.len(),
        dates: series.origin.dates.clone(),
        day_starts: series.origin.day_starts.clone(),
        independent_segments,
        flow_intensity,
    };
    entry.file = format!("{}.lrm", entry.stem());
    cache::save(&dir.join(&entry.file), series)?;
    Ok(entry)
}
