//! Browser bindings for the demo page in `www/`.
//!
//! Three operations, each returning plain `Float64Array`s for plotting:
//! posterior CDF curves for one sampler, the high-information sweep of
//! `exp(D2)` against its quadrature value, and how LAPS and SLIPS approach
//! LIPS as their amplification grows.

use priorpost::diagnostics::{d2_hat, ks_distance};
use priorpost::engine::run_sharded_stream;
use priorpost::models::{oracle_prior_integrals, GaussianGaussian};
use priorpost::rng::{RESAMPLE, SWEEP};
use priorpost::{amplify, posterior_probability, resample, weigh, EmpiricalMeasure, Error, Model, RngStream, DEFAULT_COPY_CAP};
use wasm_bindgen::prelude::*;

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

fn model(t: u32, x: f64) -> Result<GaussianGaussian, Error> {
    GaussianGaussian::new(0.0, 1.0, 1.0, u64::from(t.max(1)), x)
}

/// Empirical and exact posterior CDF on a grid.
#[wasm_bindgen]
pub struct CdfCurves {
    grid: Vec<f64>,
    empirical: Vec<f64>,
    exact: Vec<f64>,
    ks: f64,
    sample_size: usize,
}

#[wasm_bindgen]
impl CdfCurves {
    #[wasm_bindgen(getter)]
    pub fn grid(&self) -> Vec<f64> {
        self.grid.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn empirical(&self) -> Vec<f64> {
        self.empirical.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn ks(&self) -> f64 {
        self.ks
    }
    /// Number of draws in the approximation (the LAPS bag can exceed `n`).
    #[wasm_bindgen(getter, js_name = sampleSize)]
    pub fn sample_size(&self) -> usize {
        self.sample_size
    }
}

fn curves<P: EmpiricalMeasure>(post: &P, m: &GaussianGaussian, points: usize) -> CdfCurves {
    let (mean, var) = m.posterior_moments(0).expect("analytic posterior");
    let sd = var.sqrt();
    let points = points.max(2);
    let grid: Vec<f64> = (0..points)
        .map(|i| mean + sd * (-4.0 + 8.0 * i as f64 / (points - 1) as f64))
        .collect();
    let cdf = |x: f64| m.posterior_cdf(0, x).expect("analytic posterior");
    CdfCurves {
        empirical: grid.iter().map(|&g| posterior_probability(post, |t| t[0] <= g)).collect(),
        exact: grid.iter().map(|&g| cdf(g)).collect(),
        ks: ks_distance(post, cdf, 0),
        sample_size: post.draws().len(),
        grid,
    }
}

/// Posterior CDF of `theta` after `t` unit-variance observations with mean
/// `x` under a N(0, 1) prior, approximated by `algorithm` ("lips", "laps"
/// or "slips") from `n` prior draws. `amount` is `c` for LAPS and `m` for
/// SLIPS and is ignored for LIPS.
#[wasm_bindgen(js_name = posteriorCdf)]
#[allow(clippy::too_many_arguments)]
pub fn posterior_cdf(algorithm: &str, x: f64, t: u32, n: usize, amount: f64, seed: u64, points: usize) -> Result<CdfCurves, JsError> {
    let m = model(t, x).map_err(js)?;
    let rng = RngStream::new(seed);
    let (draws, ll) = run_sharded_stream(&m, n, 1, &rng).map_err(js)?;
    Ok(match algorithm {
        "lips" => curves(&weigh(draws, &ll).map_err(js)?, &m, points),
        "laps" => curves(&amplify(&draws, &ll, amount, DEFAULT_COPY_CAP).map_err(js)?, &m, points),
        "slips" => {
            let weighted = weigh(draws, &ll).map_err(js)?;
            let size = if amount >= 1.0 { amount as usize } else { n };
            curves(&resample(&weighted, size, &rng.child(RESAMPLE)).map_err(js)?, &m, points)
        }
        other => return Err(JsError::new(&format!("unknown algorithm {other:?}"))),
    })
}

/// Plug-in and exact `Π₀(f²)/Π₀(f)²` over information levels.
#[wasm_bindgen]
pub struct Sweep {
    t: Vec<f64>,
    estimate: Vec<f64>,
    exact: Vec<f64>,
}

#[wasm_bindgen]
impl Sweep {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn estimate(&self) -> Vec<f64> {
        self.estimate.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }
}

/// `exp(d2_hat)` from `n` draws and its quadrature value for `t = 1, 2, 4, …, t_max`.
#[wasm_bindgen(js_name = informationSweep)]
pub fn information_sweep(x: f64, n: usize, t_max: u32, seed: u64) -> Result<Sweep, JsError> {
    let base = RngStream::new(seed).child(SWEEP);
    let mut out = Sweep {
        t: Vec::new(),
        estimate: Vec::new(),
        exact: Vec::new(),
    };
    let mut t = 1u32;
    let mut i = 0u64;
    while t <= t_max.max(1) {
        let m = model(t, x).map_err(js)?;
        let (_, ll) = run_sharded_stream(&m, n, 1, &base.child(i)).map_err(js)?;
        out.t.push(f64::from(t));
        out.estimate.push(d2_hat(&ll).map_err(js)?.exp());
        out.exact.push(oracle_prior_integrals(&m, None).map_err(js)?.second_moment_ratio());
        t = match t.checked_mul(2) {
            Some(next) => next,
            None => break,
        };
        i += 1;
    }
    Ok(out)
}

/// Distance of LAPS and SLIPS from LIPS on one batch.
#[wasm_bindgen]
pub struct Convergence {
    amount: Vec<f64>,
    laps_error: Vec<f64>,
    slips_tv: Vec<f64>,
}

#[wasm_bindgen]
impl Convergence {
    /// `c` for LAPS, `m / n` for SLIPS.
    #[wasm_bindgen(getter)]
    pub fn amount(&self) -> Vec<f64> {
        self.amount.clone()
    }
    /// Largest half-line probability error of LAPS.
    #[wasm_bindgen(getter, js_name = lapsError)]
    pub fn laps_error(&self) -> Vec<f64> {
        self.laps_error.clone()
    }
    /// Total variation between SLIPS source frequencies and LIPS weights.
    #[wasm_bindgen(getter, js_name = slipsTv)]
    pub fn slips_tv(&self) -> Vec<f64> {
        self.slips_tv.clone()
    }
}

/// On one batch of `n` draws, for amplification `a = 1, 10, …, 10^(decades-1)`:
/// LAPS with `c = a` and SLIPS with `m = a·n`.
#[wasm_bindgen]
pub fn convergence(x: f64, n: usize, decades: u32, seed: u64) -> Result<Convergence, JsError> {
    let m = model(1, x).map_err(js)?;
    let rng = RngStream::new(seed);
    let (draws, ll) = run_sharded_stream(&m, n, 1, &rng).map_err(js)?;
    let weighted = weigh(draws.clone(), &ll).map_err(js)?;
    let (mean, var) = m.posterior_moments(0).expect("analytic posterior");
    let cuts: Vec<f64> = [-1.5, -0.5, 0.0, 0.5, 1.5].iter().map(|z| mean + z * var.sqrt()).collect();
    let mut out = Convergence {
        amount: Vec::new(),
        laps_error: Vec::new(),
        slips_tv: Vec::new(),
    };
    for k in 0..decades.clamp(1, 5) {
        let a = 10f64.powi(k as i32);
        let bag = amplify(&draws, &ll, a, DEFAULT_COPY_CAP).map_err(js)?;
        let err = cuts
            .iter()
            .map(|&c| (posterior_probability(&bag, |t| t[0] <= c) - posterior_probability(&weighted, |t| t[0] <= c)).abs())
            .fold(0.0, f64::max);
        let res = resample(&weighted, n * a as usize, &rng.child(RESAMPLE).child(u64::from(k))).map_err(js)?;
        let freq = res.source_frequencies(n).expect("resampling records sources");
        let tv = 0.5 * freq.iter().zip(weighted.weights()).map(|(f, w)| (f - w).abs()).sum::<f64>();
        out.amount.push(a);
        out.laps_error.push(err);
        out.slips_tv.push(tv);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_curves_track_exact() {
        for (alg, amount) in [("lips", 0.0), ("laps", 100.0), ("slips", 0.0)] {
            let c = posterior_cdf(alg, 1.0, 1, 20_000, amount, 3, 50).ok().unwrap();
            assert_eq!(c.grid().len(), 50);
            assert!(c.ks() < 0.03, "{alg}: {}", c.ks());
            assert!(c.empirical().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn sweep_follows_quadrature() {
        let s = information_sweep(1.0, 100_000, 64, 1).ok().unwrap();
        assert_eq!(s.t().len(), 7);
        for (e, x) in s.estimate().iter().zip(s.exact()) {
            assert!((e / x - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn convergence_shrinks() {
        let c = convergence(1.0, 500, 4, 1).ok().unwrap();
        assert!(c.laps_error()[3] < c.laps_error()[0]);
        assert!(c.slips_tv()[3] < c.slips_tv()[0]);
    }
}
