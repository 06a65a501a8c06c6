//! Long-range memory analysis of order dis-balance series.
//!
//! The crate reconstructs order dis-balance and mid-price series from
//! LOBSTER limit order book files and estimates the Hurst exponent with four
//! methods: the periodogram power spectral density, rescaled range,
//! multifractal detrended fluctuation analysis, and burst/inter-burst
//! duration analysis. Exact synthetic generators (fractional Brownian motion
//! and a nonlinear SDE with spurious long-range memory) provide ground truth.
//!
//! Module map:
//!
//! - [`lob`]: LOBSTER parsing, book snapshots and series construction
//! - [`series`]: time-stamped and uniform series, resampling, profiles
//! - [`estimators`]: periodogram, R/S and MF-DFA
//! - [`bda`]: threshold passages, durations, log-binned PDFs, power-law fits
//! - [`synth`]: fBm/fGn, Brownian motion and nonlinear SDE generators
//! - [`cache`]: the binary columnar series cache

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bda;
pub mod cache;
pub mod error;
pub mod estimators;
pub mod fit;
pub mod lob;
pub mod series;
pub mod synth;

pub use error::{Error, Result};
pub use series::{Series, SeriesOrigin, TimeDomain, UniformSeries};
