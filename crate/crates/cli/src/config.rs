//! Run configuration: a flat `key = value` file overlaid by command-line
//! flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use lrm_core::synth::{FbmOutput, SdeSpec};

/// Environment variable supplying the default LOBSTER data directory.
pub const DATA_DIR_ENV: &str = "LRM_DATA_DIR";

/// Flags shared by every subcommand. Each one overrides the matching key of
/// the `--config` file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Directory with LOBSTER message/orderbook files [env: LRM_DATA_DIR]
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Working directory for caches, tables and reports
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated ticker symbols
    #[arg(long, value_delimiter = ',')]
    pub symbols: Option<Vec<String>>,
    /// Number of book levels in the LOBSTER files
    #[arg(long)]
    pub levels: Option<usize>,
    /// Resampling steps for real-time series, in seconds
    #[arg(long, value_delimiter = ',')]
    pub tau_real_seconds: Option<Vec<f64>>,
    /// Resampling steps for event-time series, in ticks
    #[arg(long, value_delimiter = ',')]
    pub tau_event_ticks: Option<Vec<f64>>,
    /// BDA thresholds; defaults to the 0.45/0.5/0.55 quantiles and 0
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub thresholds: Option<Vec<f64>>,
    #[arg(long)]
    pub bins_per_decade: Option<usize>,
    /// Comma-separated subset of psd,rs,dfa,bda
    #[arg(long)]
    pub estimators: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Flat key = value configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimatorSet {
    pub psd: bool,
    pub rs: bool,
    pub dfa: bool,
    pub bda: bool,
}

impl EstimatorSet {
    pub const ALL: EstimatorSet = EstimatorSet {
        psd: true,
        rs: true,
        dfa: true,
        bda: true,
    };

    pub fn parse(s: &str) -> Result<Self> {
        let mut set = EstimatorSet {
            psd: false,
            rs: false,
            dfa: false,
            bda: false,
        };
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name.to_ascii_lowercase().as_str() {
                "psd" => set.psd = true,
                "rs" => set.rs = true,
                "dfa" | "mfdfa" => set.dfa = true,
                "bda" => set.bda = true,
                "all" => set = Self::ALL,
                "none" => {}
                other => bail!("unknown estimator `{other}` (expected psd, rs, dfa, bda)"),
            }
        }
        Ok(set)
    }

    pub fn any(&self) -> bool {
        self.psd || self.rs || self.dfa || self.bda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Fbm,
    Brownian,
    Sde,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub kind: SynthKind,
    pub hurst: f64,
    /// Length of each realization (power of two for fBm).
    pub n: usize,
    /// Independent realizations, seeds `seed, seed + 1, ...`.
    pub realizations: usize,
    pub output: FbmOutput,
    pub sde: SdeSpec,
    /// Name used in place of a ticker symbol.
    pub symbol: Option<String>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            kind: SynthKind::Fbm,
            hurst: 0.7,
            n: 1 << 20,
            realizations: 1,
            output: FbmOutput::Motion,
            sde: SdeSpec::default(),
            symbol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_dir: Option<PathBuf>,
    pub out: PathBuf,
    pub symbols: Vec<String>,
    pub levels: usize,
    pub tau_real_seconds: Vec<f64>,
    pub tau_event_ticks: Vec<f64>,
    pub thresholds: Option<Vec<f64>>,
    pub bins_per_decade: usize,
    pub estimators: EstimatorSet,
    pub seed: u64,
    pub threads: Option<usize>,
    pub trim_epsilon: f64,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_dir: None,
            out: PathBuf::from("lrm-out"),
            symbols: Vec::new(),
            levels: 10,
            tau_real_seconds: vec![200.0],
            tau_event_ticks: vec![500.0, 2000.0],
            thresholds: None,
            bins_per_decade: lrm_core::bda::DEFAULT_BINS_PER_DECADE,
            estimators: EstimatorSet::ALL,
            seed: 1,
            threads: None,
            trim_epsilon: lrm_core::lob::DEFAULT_TRIM_EPSILON,
            synth: SynthConfig::default(),
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| anyhow::anyhow!("{key}: bad value `{s}`: {e}"))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.trim()
        .parse::<T>()
        .map_err(|e| anyhow::anyhow!("{key}: bad value `{v}`: {e}"))
}

impl RunConfig {
    /// Defaults, then the config file, then flags, then `LRM_DATA_DIR` if no
    /// data directory was given.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &args.config {
            cfg.apply_file(path)?;
        }
        cfg.apply_flags(args)?;
        if cfg.data_dir.is_none() {
            cfg.data_dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        self.apply_text(&text)
            .with_context(|| format!("in config file {}", path.display()))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`", i + 1);
            };
            self.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "data_dir" => self.data_dir = Some(PathBuf::from(v)),
            "out" => self.out = PathBuf::from(v),
            "symbols" => self.symbols = parse_list(key, v)?,
            "levels" => self.levels = parse_one(key, v)?,
            "tau_real_seconds" => self.tau_real_seconds = parse_list(key, v)?,
            "tau_event_ticks" => self.tau_event_ticks = parse_list(key, v)?,
            "thresholds" => self.thresholds = Some(parse_list(key, v)?),
            "bins_per_decade" => self.bins_per_decade = parse_one(key, v)?,
            "estimators" => self.estimators = EstimatorSet::parse(v)?,
            "seed" => self.seed = parse_one(key, v)?,
            "threads" => self.threads = Some(parse_one(key, v)?),
            "trim_epsilon" => self.trim_epsilon = parse_one(key, v)?,
            "synth_kind" => {
                self.synth.kind = match v {
                    "fbm" => SynthKind::Fbm,
                    "brownian" => SynthKind::Brownian,
                    "sde" => SynthKind::Sde,
                    other => bail!("synth_kind: expected fbm, brownian or sde, got `{other}`"),
                }
            }
            "synth_hurst" => self.synth.hurst = parse_one(key, v)?,
            "synth_n" => self.synth.n = parse_one(key, v)?,
            "synth_realizations" => self.synth.realizations = parse_one(key, v)?,
            "synth_output" => {
                self.synth.output = match v {
                    "motion" => FbmOutput::Motion,
                    "increments" => FbmOutput::Increments,
                    other => bail!("synth_output: expected motion or increments, got `{other}`"),
                }
            }
            "synth_symbol" => self.synth.symbol = Some(v.to_string()),
            "sde_eta" => self.synth.sde.eta = parse_one(key, v)?,
            "sde_lambda" => self.synth.sde.lambda = parse_one(key, v)?,
            "sde_x_min" => self.synth.sde.x_min = parse_one(key, v)?,
            "sde_x_max" => self.synth.sde.x_max = parse_one(key, v)?,
            "sde_dt_scale" => self.synth.sde.dt_scale = parse_one(key, v)?,
            "sde_obs_step" => self.synth.sde.obs_step = parse_one(key, v)?,
            "sde_n" => self.synth.sde.n = parse_one(key, v)?,
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    fn apply_flags(&mut self, a: &CommonArgs) -> Result<()> {
        if let Some(v) = &a.data_dir {
            self.data_dir = Some(v.clone());
        }
        if let Some(v) = &a.out {
            self.out = v.clone();
        }
        if let Some(v) = &a.symbols {
            self.symbols = v.clone();
        }
        if let Some(v) = a.levels {
            self.levels = v;
        }
        if let Some(v) = &a.tau_real_seconds {
            self.tau_real_seconds = v.clone();
        }
        if let Some(v) = &a.tau_event_ticks {
            self.tau_event_ticks = v.clone();
        }
        if let Some(v) = &a.thresholds {
            self.thresholds = Some(v.clone());
        }
        if let Some(v) = a.bins_per_decade {
            self.bins_per_decade = v;
        }
        if let Some(v) = a.seed {
            self.seed = v;
        }
        if let Some(v) = a.threads {
            self.threads = Some(v);
        }
        if let Some(v) = &a.estimators {
            self.estimators = EstimatorSet::parse(v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.estimators.any() {
            bail!("no estimator enabled; choose at least one of psd, rs, dfa, bda");
        }
        let taus = self.tau_real_seconds.iter().chain(&self.tau_event_ticks);
        if let Some(t) = taus.clone().find(|t| !(t.is_finite() && **t > 0.0)) {
            bail!("resampling steps must be positive, got {t}");
        }
        if let Some(h) = self.thresholds.iter().flatten().find(|h| !h.is_finite()) {
            bail!("thresholds must be finite, got {h}");
        }
        if matches!(&self.thresholds, Some(t) if t.is_empty()) {
            bail!("threshold list is empty");
        }
        if self.bins_per_decade < 2 {
            bail!(
                "bins_per_decade must be at least 2, got {}",
                self.bins_per_decade
            );
        }
        if self.levels == 0 {
            bail!("levels must be at least 1");
        }
        if self.threads == Some(0) {
            bail!("threads must be at least 1");
        }
        if self.synth.realizations == 0 {
            bail!("synth_realizations must be at least 1");
        }
        Ok(())
    }
}
