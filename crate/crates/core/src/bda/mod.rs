//! Burst and inter-burst duration analysis.
//!
//! A series spends alternating stretches above and below a threshold `h_x`.
//! Stretches above are bursts, stretches below are inter-bursts. For a
//! process with correlated increments and Hurst exponent `H` the duration
//! density decays as `P(T) ~ T^{-γ}` with `γ = 2 − H`; any Markov process
//! gives `γ = 3/2` over at least part of its range, whatever its spectrum
//! looks like. Durations are invariant under strictly increasing transforms
//! of the series, which makes the method insensitive to the marginal
//! distribution.

mod durations;
mod histogram;
mod pipeline;

pub use durations::{
    extract_durations, threshold_passages, threshold_passages_uniform, CrossingSequence,
    DurationKind, DurationSet, Side,
};
pub use histogram::{
    fit_powerlaw_region, hurst_from_bda, log_binned_pdf, select_fit_region, FitRegion,
    LogBinnedPdf, PowerLawFit, MIN_FIT_BINS, MIN_REGION_BINS, MIN_REGION_DECADES,
};
pub use pipeline::{
    analyze_durations, bda_pipeline, default_thresholds, discreteness_floor, BdaConfig, BdaFit,
    BdaReport, KindOutcome, ThresholdReport, DEFAULT_BINS_PER_DECADE, DEFAULT_QUANTILES,
};
