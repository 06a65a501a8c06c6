use lrm_core::estimators::{
    default_window_sizes, fit_two_regime_psd, generalized_hurst, mfdfa, rescaled_range,
    PsdEstimate, DEFAULT_Q_VALUES,
};
use lrm_core::fit::logspace;
use lrm_core::synth::FgnGenerator;
use lrm_core::{TimeDomain, UniformSeries};
use proptest::prelude::*;

/// Plain second-order DFA written from scratch: profile of the demeaned
/// series, boxes from both ends, least-squares line via the normal equations
/// in absolute coordinates.
fn plain_dfa(x: &[f64], n: usize) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut y = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for v in x {
        acc += v - mean;
        y.push(acc);
    }
    let len = y.len();
    let m = len / n;
    let mut starts: Vec<usize> = (0..m).map(|j| j * n).collect();
    starts.extend((0..m).map(|j| len - (j + 1) * n));
    let mut total = 0.0;
    for &s in &starts {
        let seg = &y[s..s + n];
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for (k, &v) in seg.iter().enumerate() {
            let t = (s + k) as f64;
            sx += t;
            sy += v;
            sxx += t * t;
            sxy += t * v;
        }
        let nf = n as f64;
        let b = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
        let a = (sy - b * sx) / nf;
        let f2 = seg
            .iter()
            .enumerate()
            .map(|(k, &v)| (v - a - b * (s + k) as f64).powi(2))
            .sum::<f64>()
            / nf;
        total += f2;
    }
    (total / starts.len() as f64).sqrt()
}

fn fgn(h: f64, n: usize, seed: u64) -> UniformSeries {
    let g = FgnGenerator::new(h, n).unwrap();
    UniformSeries::new(1.0, g.sample(seed), TimeDomain::EventTicks)
}

#[test]
fn mfdfa_q2_matches_plain_dfa() {
    let u = fgn(0.7, 1 << 14, 5);
    let ns = [10, 16, 33, 100, 257, 1000, 4096];
    let surface = mfdfa(&u, &ns, &[2.0]).unwrap();
    for (i, &n) in ns.iter().enumerate() {
        let a = surface.f[0][i];
        let b = plain_dfa(&u.values, n);
        assert!((a / b - 1.0).abs() < 1e-6, "n = {n}: {a} vs {b}");
    }
}

#[test]
fn fgn_hurst_from_rs_and_dfa() {
    for (h, seed) in [(0.3, 1), (0.5, 2), (0.7, 3), (0.85, 4)] {
        let u = fgn(h, 1 << 17, seed);
        let ns = default_window_sizes(u.len());
        let rs = rescaled_range(&u, &ns).unwrap();
        let tol = if h < 0.5 { 0.1 } else { 0.07 };
        assert!((rs.hurst - h).abs() < tol, "R/S at H = {h}: {}", rs.hurst);
        let gh = generalized_hurst(&mfdfa(&u, &ns, &DEFAULT_Q_VALUES).unwrap()).unwrap();
        let h2 = gh.iter().find(|g| g.q == 2.0).unwrap().hurst.unwrap();
        assert!((h2 - h).abs() < 0.05, "DFA at H = {h}: {h2}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_regime_fit_recovers_own_model(
        b1 in 0.0f64..1.5,
        db in 0.3f64..1.5,
        lb in -2.5f64..-1.0,
    ) {
        let b2 = b1 + db;
        let f_break = 10f64.powf(lb);
        let frequencies = logspace(1e-4, 0.5, 200);
        // continuous at the break
        let power = frequencies
            .iter()
            .map(|&f| {
                if f <= f_break {
                    (f / f_break).powf(-b1)
                } else {
                    (f / f_break).powf(-b2)
                }
            })
            .collect();
        let psd = PsdEstimate { frequencies, power, n_days_averaged: 1, fit: None };
        let fit = fit_two_regime_psd(&psd).unwrap();
        prop_assert!((fit.beta_low - b1).abs() < 0.02);
        prop_assert!((fit.beta_high - b2).abs() < 0.02);
    }
}
