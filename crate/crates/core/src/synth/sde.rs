//! Nonlinear SDE with power-law stationary density and power-law spectrum.
//!
//! `dx = (η − λ/2) x^{2η−1} dt + x^η dW` on `[x_min, x_max]` with reflecting
//! boundaries has the stationary density `p(x) ∝ x^{−λ}`. Its increments are
//! uncorrelated (it is Markov), yet the spectrum is 1/f^β-like over a wide
//! band, which fools the classical estimators. The drift/diffusion form is a
//! reconstruction of the standard class used in the stochastic modelling of
//! trading activity.
//!
//! Integration uses Euler steps of variable length `Δt = κ² x^{2−2η}`: with
//! that choice the drift term becomes `κ²(η − λ/2) x` and the noise term
//! `κ x ξ`, a constant relative step size.
//!
//! The step near a threshold `x_h` sets the shortest resolvable duration,
//! about `κ² x_h^{2−2η}`, while the 3/2 law ends near `x_h^{2−2η}`. The
//! defaults keep `κ²` small enough for roughly three decades between the two;
//! `x_max` is kept at 100 so the step at the upper boundary stays above the
//! underflow limit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::series::{Series, SeriesOrigin, TimeDomain};
use crate::{Error, Result};

/// Smallest admissible Euler step.
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdeSpec {
    /// Diffusion power-law exponent η (> 1).
    pub eta: f64,
    /// Stationary density exponent λ.
    pub lambda: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// κ², the dimensionless step control.
    pub dt_scale: f64,
    /// Spacing of the observation grid.
    pub obs_step: f64,
    /// Number of observations emitted.
    pub n: usize,
    pub seed: u64,
}

impl Default for SdeSpec {
    fn default() -> Self {
        SdeSpec {
            eta: 2.5,
            lambda: 3.0,
            x_min: 1.0,
            x_max: 100.0,
            dt_scale: 1e-4,
            obs_step: 2e-5,
            n: 10_000_000,
            seed: 1,
        }
    }
}

impl SdeSpec {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.x_min > 0.0) {
            return bad(format!("x_min must be positive, got {}", self.x_min));
        }
        if !(self.x_max > self.x_min) {
            return bad(format!(
                "x_max {} must exceed x_min {}",
                self.x_max, self.x_min
            ));
        }
        if !(self.eta > 1.0) {
            return bad(format!("eta must exceed 1, got {}", self.eta));
        }
        if !(self.dt_scale > 0.0) || !(self.obs_step > 0.0) {
            return bad("dt_scale and obs_step must be positive".into());
        }
        if !self.lambda.is_finite() {
            return bad("lambda must be finite".into());
        }
        Ok(())
    }

    /// Euler step length at level `x`.
    pub fn step_at(&self, x: f64) -> f64 {
        self.dt_scale * x.powf(2.0 - 2.0 * self.eta)
    }
}

/// Fold `x` back into `[lo, hi]` by repeated mirror reflection.
fn reflect(x: f64, lo: f64, hi: f64) -> f64 {
    if (lo..=hi).contains(&x) {
        return x;
    }
    let w = hi - lo;
    let y = (x - lo).rem_euclid(2.0 * w);
    lo + if y > w { 2.0 * w - y } else { y }
}

/// Integrate the SDE from `x_min` and sample it every `obs_step` time units.
/// The value at an observation instant is the state of the Euler step
/// covering it.
pub fn gen_nonlinear_sde(spec: &SdeSpec) -> Result<Series> {
    spec.validate()?;
    let fastest = spec.step_at(spec.x_max);
    if fastest < MIN_STEP {
        return Err(Error::Numerical(format!(
            "Euler step underflows at x_max ({fastest:e} < {MIN_STEP:e}); \
             use a larger dt_scale or a smaller x_max"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let kappa = spec.dt_scale.sqrt();
    let drift = spec.dt_scale * (spec.eta - 0.5 * spec.lambda);
    let mut x = spec.x_min;
    let mut t = 0.0;
    let mut dt = spec.step_at(x);
    let mut times = Vec::with_capacity(spec.n);
    let mut values = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let obs = i as f64 * spec.obs_step;
        while t + dt <= obs {
            let xi: f64 = StandardNormal.sample(&mut rng);
            x = reflect(x + drift * x + kappa * x * xi, spec.x_min, spec.x_max);
            t += dt;
            dt = spec.step_at(x);
        }
        times.push(obs);
        values.push(x);
    }
    Ok(Series {
        domain: TimeDomain::RealTimeSeconds,
        times,
        values,
        origin: SeriesOrigin::new(
            "sde",
            format!(
                "nonlinear SDE eta={} lambda={} x=[{}, {}] kappa2={} obs_step={} seed={}",
                spec.eta,
                spec.lambda,
                spec.x_min,
                spec.x_max,
                spec.dt_scale,
                spec.obs_step,
                spec.seed
            ),
        ),
    })
}
