use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::series::{TimeDomain, UniformSeries};
use crate::{Error, Result};

/// Largest negative circulant eigenvalue tolerated (and clamped to zero).
const EIGEN_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FbmOutput {
    /// Cumulative sum starting at 0.
    Motion,
    /// Fractional Gaussian noise with unit variance.
    Increments,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FbmSpec {
    pub hurst: f64,
    /// Output length; a power of two.
    pub n: usize,
    pub seed: u64,
    pub output: FbmOutput,
}

/// Autocovariance of unit-variance fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Circulant-embedding sampler for fGn of a fixed `(H, N)`.
///
/// The embedding eigenvalues and FFT plan are computed once, so sampling many
/// seeds costs one FFT of size `2N` each.
pub struct FgnGenerator {
    hurst: f64,
    n: usize,
    /// `sqrt(λ_k / 2N)` for the `2N` circulant eigenvalues.
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FgnGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgnGenerator")
            .field("hurst", &self.hurst)
            .field("n", &self.n)
            .finish()
    }
}

impl FgnGenerator {
    pub fn new(hurst: f64, n: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "Hurst exponent must lie in (0, 1), got {hurst}"
            )));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "fBm length must be a power of two >= 2, got {n}"
            )));
        }
        let m = 2 * n;
        let mut row: Vec<Complex64> = (0..m)
            .map(|j| {
                let lag = if j <= n { j } else { m - j };
                Complex64::new(fgn_autocovariance(hurst, lag), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);
        let mut scale = Vec::with_capacity(m);
        for (k, ev) in row.iter().enumerate() {
            let lambda = ev.re;
            if lambda < -EIGEN_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "circulant embedding has negative eigenvalue {lambda:e} at index {k}"
                )));
            }
            scale.push((lambda.max(0.0) / m as f64).sqrt());
        }
        Ok(FgnGenerator {
            hurst,
            n,
            scale,
            fft,
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// One fGn realisation; identical seeds give identical output.
    pub fn sample(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // With w_k = sqrt(λ_k / 2N) (Z_k + i Z'_k), E[Y Y*] = 2C and
        // E[Y Y^T] = 0 for Y = FFT(w), so Re(Y) has covariance exactly C.
        let mut w: Vec<Complex64> = self
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re * s, im * s)
            })
            .collect();
        self.fft.process(&mut w);
        w.truncate(self.n);
        w.into_iter().map(|c| c.re).collect()
    }
}

/// Exact fBm or fGn on the unit grid.
pub fn gen_fbm(spec: &FbmSpec) -> Result<UniformSeries> {
    let gen = FgnGenerator::new(spec.hurst, spec.n)?;
    let noise = gen.sample(spec.seed);
    let values = match spec.output {
        FbmOutput::Increments => noise,
        FbmOutput::Motion => integrate_noise(&noise),
    };
    Ok(UniformSeries::new(1.0, values, TimeDomain::EventTicks))
}

/// Motion of the same length as `noise`: `B_0 = 0`, `B_k = Σ_{i<k} X_i`.
pub fn integrate_noise(noise: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    noise
        .iter()
        .map(|x| {
            let b = acc;
            acc += x;
            b
        })
        .collect()
}

/// Standard Brownian motion with unit-variance steps.
pub fn gen_brownian(n: usize, seed: u64) -> Result<UniformSeries> {
    gen_fbm(&FbmSpec {
        hurst: 0.5,
        n,
        seed,
        output: FbmOutput::Motion,
    })
}
