//! Batch pipeline behind the `lrm` binary: `ingest`, `synth`, `analyze` and
//! `report`, all sharing one output directory.

pub mod analyze;
pub mod config;
pub mod ingest;
pub mod manifest;
pub mod output;
pub mod report;
pub mod synth;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig, SynthKind};

#[derive(Debug, Parser)]
#[command(
    name = "lrm",
    version,
    about = "Long-range memory analysis of order dis-balance series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KindArg {
    Fbm,
    Brownian,
    Sde,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse LOBSTER files and cache the real-time and event-time series
    Ingest {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Generate a synthetic ensemble and cache it like ingested data
    Synth {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Hurst exponent of the fBm
        #[arg(long)]
        hurst: Option<f64>,
        /// Samples per realization
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        realizations: Option<usize>,
        /// Emit fGn increments instead of the fBm path
        #[arg(long)]
        increments: bool,
    },
    /// Run the estimators over every cached series
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Collect the estimates into hurst_comparison.csv
    Report {
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Whether every requested estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    Partial,
}

fn init_threads(cfg: &RunConfig) {
    if let Some(n) = cfg.threads {
        // a second call in the same process (tests) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Ingest { common } => {
            let cfg = RunConfig::resolve(&common)?;
            init_threads(&cfg);
            let m = ingest::run(&cfg)?;
            Ok(if m.skipped.is_empty() {
                Outcome::Complete
            } else {
                Outcome::Partial
            })
        }
        Command::Synth {
            common,
            kind,
            hurst,
            n,
            realizations,
            increments,
        } => {
            let mut cfg = RunConfig::resolve(&common)?;
            if let Some(k) = kind {
                cfg.synth.kind = match k {
                    KindArg::Fbm => SynthKind::Fbm,
                    KindArg::Brownian => SynthKind::Brownian,
                    KindArg::Sde => SynthKind::Sde,
                };
            }
            if let Some(h) = hurst {
                cfg.synth.hurst = h;
            }
            if let Some(n) = n {
                cfg.synth.n = n;
                cfg.synth.sde.n = n;
            }
            if let Some(r) = realizations {
                cfg.synth.realizations = r;
            }
            if increments {
                cfg.synth.output = lrm_core::synth::FbmOutput::Increments;
            }
            cfg.validate()?;
            init_threads(&cfg);
            synth::run(&cfg)?;
            Ok(Outcome::Complete)
        }
        Command::Analyze { common } => {
            let cfg = RunConfig::resolve(&common)?;
            init_threads(&cfg);
            let s = analyze::run(&cfg)?;
            Ok(if s.failures.is_empty() {
                Outcome::Complete
            } else {
                Outcome::Partial
            })
        }
        Command::Report { common } => {
            let cfg = RunConfig::resolve(&common)?;
            report::run(&cfg)?;
            Ok(Outcome::Complete)
        }
    }
}
