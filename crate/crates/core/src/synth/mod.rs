//! Ground-truth generators: exact fractional Gaussian noise / fractional
//! Brownian motion by circulant embedding, plain Brownian motion, and a
//! nonlinear SDE whose power-law statistics come from a Markov process
//! (spurious long-range memory).
//!
//! The fGn generator reproduces the autocovariance
//! `γ(k) = ½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})` exactly, which decays as
//! `k^{2H−2}` and so carries long-range memory for `H > 1/2`.

mod fbm;
mod sde;

pub use fbm::{
    fgn_autocovariance, gen_brownian, gen_fbm, integrate_noise, FbmOutput, FbmSpec, FgnGenerator,
};
pub use sde::{gen_nonlinear_sde, SdeSpec};
