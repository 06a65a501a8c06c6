//! The three classical Hurst estimators: periodogram power spectral density,
//! rescaled range (R/S), and multifractal detrended fluctuation analysis.

mod mfdfa;
mod psd;
mod rs;

pub use mfdfa::{generalized_hurst, mfdfa, GeneralizedHurst, MfdfaSurface, DEFAULT_Q_VALUES};
pub use psd::{
    average_daily_psd, fit_two_regime_psd, frequency_grid, hurst_from_psd, low_frequency_slope,
    periodogram, periodogram_with_span, PsdEstimate, TwoRegimeFit, DEFAULT_GRID_POINTS,
    MIN_POINTS_PER_REGIME,
};
pub use rs::{rescaled_range, RsCurve};

/// Default window sizes for R/S and MF-DFA: 16 log-spaced values from 10 to
/// `N/4`.
pub fn default_window_sizes(len: usize) -> Vec<usize> {
    crate::fit::log_spaced_sizes(10, len / 4, 16)
}
