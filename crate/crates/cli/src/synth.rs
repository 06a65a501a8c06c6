//! `synth`: synthetic ensembles cached in the same format as ingested data.

use anyhow::{Context, Result};
use lrm_core::lob::stitch_days;
use lrm_core::synth::{gen_nonlinear_sde, integrate_noise, FbmOutput, FgnGenerator, SdeSpec};
use lrm_core::{Series, TimeDomain, UniformSeries};
use rayon::prelude::*;
use tracing::info;

use crate::config::{RunConfig, SynthKind};
use crate::manifest::{store, Manifest};

pub const SYNTH_PERIOD: &str = "synth";

fn realization(cfg: &RunConfig, gen: Option<&FgnGenerator>, r: usize) -> Result<Series> {
    let seed = cfg.seed.wrapping_add(r as u64);
    let s = match cfg.synth.kind {
        SynthKind::Sde => gen_nonlinear_sde(&SdeSpec {
            seed,
            ..cfg.synth.sde
        })?,
        SynthKind::Fbm | SynthKind::Brownian => {
            let noise = gen.expect("generator built for fBm").sample(seed);
            let values = match (cfg.synth.kind, cfg.synth.output) {
                (SynthKind::Fbm, FbmOutput::Increments) => noise,
                _ => integrate_noise(&noise),
            };
            UniformSeries::new(1.0, values, TimeDomain::EventTicks).to_series()
        }
    };
    Ok(s)
}

pub fn symbol(cfg: &RunConfig) -> String {
    if let Some(s) = &cfg.synth.symbol {
        return s.clone();
    }
    match cfg.synth.kind {
        SynthKind::Fbm => format!("fbm-H{}", cfg.synth.hurst),
        SynthKind::Brownian => "brownian".into(),
        SynthKind::Sde => "sde".into(),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Manifest> {
    std::fs::create_dir_all(&cfg.out)
        .with_context(|| format!("cannot create {}", cfg.out.display()))?;
    let gen = match cfg.synth.kind {
        SynthKind::Fbm => Some(FgnGenerator::new(cfg.synth.hurst, cfg.synth.n)?),
        SynthKind::Brownian => Some(FgnGenerator::new(0.5, cfg.synth.n)?),
        SynthKind::Sde => None,
    };
    let name = symbol(cfg);
    let days = (0..cfg.synth.realizations)
        .into_par_iter()
        .map(|r| {
            let mut s = realization(cfg, gen.as_ref(), r)?;
            s.origin.symbol = name.clone();
            s.origin.dates = vec![format!("r{r}")];
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut series = stitch_days(&days);
    series.origin.symbol = name.clone();
    let entry = store(&cfg.out, &series, SYNTH_PERIOD, true, None)?;
    info!(
        symbol = %name,
        realizations = entry.n_days,
        points = entry.n_points,
        "synthetic series cached"
    );
    let manifest = Manifest {
        source: "synth".into(),
        series: vec![entry],
        skipped: Vec::new(),
    };
    manifest.write(&cfg.out)?;
    Ok(manifest)
}
