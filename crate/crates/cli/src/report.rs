//! `report`: one Hurst estimate per method, domain, period and symbol.

use std::collections::HashSet;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use crate::analyze::{HurstRecord, REPORTS_FILE};
use crate::config::RunConfig;
use crate::output::{num, write_csv};

pub const COMPARISON_FILE: &str = "hurst_comparison.csv";

/// Keep the first record of each (method, domain, period, symbol); for R/S
/// and DFA that is the first resampling step.
pub fn comparison_rows(records: &[HurstRecord]) -> Vec<Vec<String>> {
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for r in records {
        let domain = r.domain.label();
        if !seen.insert((r.method.clone(), domain, r.period.clone(), r.symbol.clone())) {
            continue;
        }
        rows.push(vec![
            r.method.clone(),
            domain.to_string(),
            r.period.clone(),
            r.symbol.clone(),
            num(r.hurst),
            r.stderr.map(num).unwrap_or_default(),
        ]);
    }
    rows
}

pub fn run(cfg: &RunConfig) -> Result<PathBuf> {
    let path = cfg.out.join(REPORTS_FILE);
    if !path.is_file() {
        bail!(
            "no analysis results in {}; run `analyze` first",
            cfg.out.display()
        );
    }
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let records: Vec<HurstRecord> =
        serde_json::from_str(&text).with_context(|| format!("malformed {}", path.display()))?;
    let out = cfg.out.join(COMPARISON_FILE);
    write_csv(
        &out,
        "method,domain,period,symbol,H,stderr",
        &comparison_rows(&records),
    )?;
    Ok(out)
}
