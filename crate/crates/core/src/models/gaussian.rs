use rand::Rng;
use rand_distr::StandardNormal;

use super::{normal_cdf, Model, OracleModel, LN_SQRT_2PI};
use crate::error::{invalid, Result};
use crate::rng::StreamRng;

fn check_sd(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {v}")))
    }
}

/// Normal prior on a scalar mean, `t` Gaussian observations summarised by
/// their average `xbar`.
///
/// The likelihood is the density of `xbar`, i.e. `N(xbar; theta, obs_sd²/t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianGaussian {
    pub prior_mean: f64,
    pub prior_sd: f64,
    pub obs_sd: f64,
    pub t: u64,
    pub xbar: f64,
}

impl GaussianGaussian {
    pub fn new(prior_mean: f64, prior_sd: f64, obs_sd: f64, t: u64, xbar: f64) -> Result<Self> {
        check_finite("prior_mean", prior_mean)?;
        check_finite("xbar", xbar)?;
        check_sd("prior_sd", prior_sd)?;
        check_sd("obs_sd", obs_sd)?;
        if t == 0 {
            return Err(invalid("t (number of observations) must be at least 1"));
        }
        Ok(Self {
            prior_mean,
            prior_sd,
            obs_sd,
            t,
            xbar,
        })
    }

    /// Standard deviation of `xbar` given `theta`.
    pub fn likelihood_sd(&self) -> f64 {
        self.obs_sd / (self.t as f64).sqrt()
    }

    pub fn posterior_var(&self) -> f64 {
        1.0 / (1.0 / (self.prior_sd * self.prior_sd) + self.t as f64 / (self.obs_sd * self.obs_sd))
    }

    pub fn posterior_mean(&self) -> f64 {
        self.posterior_var()
            * (self.prior_mean / (self.prior_sd * self.prior_sd) + self.t as f64 * self.xbar / (self.obs_sd * self.obs_sd))
    }

    fn loglik(&self, theta: f64) -> f64 {
        let s = self.likelihood_sd();
        let z = (theta - self.xbar) / s;
        -LN_SQRT_2PI - s.ln() - 0.5 * z * z
    }
}

impl Model for GaussianGaussian {
    fn dim(&self) -> usize {
        1
    }

    fn sample_prior(&self, rng: &mut StreamRng, out: &mut [f64]) {
        let z: f64 = rng.sample(StandardNormal);
        out[0] = self.prior_mean + self.prior_sd * z;
    }

    fn log_likelihood(&self, theta: &[f64]) -> f64 {
        self.loglik(theta[0])
    }

    fn posterior_cdf(&self, coord: usize, x: f64) -> Option<f64> {
        (coord == 0).then(|| normal_cdf((x - self.posterior_mean()) / self.posterior_var().sqrt()))
    }

    fn posterior_moments(&self, coord: usize) -> Option<(f64, f64)> {
        (coord == 0).then(|| (self.posterior_mean(), self.posterior_var()))
    }
}

impl OracleModel for GaussianGaussian {
    fn prior_log_density(&self, theta: f64) -> f64 {
        let z = (theta - self.prior_mean) / self.prior_sd;
        -LN_SQRT_2PI - self.prior_sd.ln() - 0.5 * z * z
    }

    fn log_lik(&self, theta: f64) -> f64 {
        self.loglik(theta)
    }

    fn support(&self) -> (f64, f64) {
        (self.prior_mean - 40.0 * self.prior_sd, self.prior_mean + 40.0 * self.prior_sd)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let m = self.posterior_mean();
        let s = self.posterior_var().sqrt();
        let mut pts = vec![self.prior_mean, self.xbar];
        for k in [1.0, 3.0, 6.0, 10.0, 20.0] {
            pts.push(m - k * s);
            pts.push(m + k * s);
        }
        pts
    }
}

/// Uniform prior on `[lo, hi]` with the Gaussian likelihood of
/// [`GaussianGaussian`]. The posterior is a truncated normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatGaussian {
    pub lo: f64,
    pub hi: f64,
    pub obs_sd: f64,
    pub t: u64,
    pub xbar: f64,
}

impl FlatGaussian {
    pub fn new(lo: f64, hi: f64, obs_sd: f64, t: u64, xbar: f64) -> Result<Self> {
        check_finite("lo", lo)?;
        check_finite("hi", hi)?;
        check_finite("xbar", xbar)?;
        check_sd("obs_sd", obs_sd)?;
        if lo >= hi {
            return Err(invalid(format!("empty prior support [{lo}, {hi}]")));
        }
        if t == 0 {
            return Err(invalid("t (number of observations) must be at least 1"));
        }
        Ok(Self { lo, hi, obs_sd, t, xbar })
    }

    pub fn likelihood_sd(&self) -> f64 {
        self.obs_sd / (self.t as f64).sqrt()
    }

    /// Prior density, constant on the support.
    pub fn prior_density(&self) -> f64 {
        1.0 / (self.hi - self.lo)
    }

    fn loglik(&self, theta: f64) -> f64 {
        let s = self.likelihood_sd();
        let z = (theta - self.xbar) / s;
        -LN_SQRT_2PI - s.ln() - 0.5 * z * z
    }
}

impl Model for FlatGaussian {
    fn dim(&self) -> usize {
        1
    }

    fn sample_prior(&self, rng: &mut StreamRng, out: &mut [f64]) {
        let u: f64 = rng.random();
        out[0] = self.lo + (self.hi - self.lo) * u;
    }

    fn log_likelihood(&self, theta: &[f64]) -> f64 {
        self.loglik(theta[0])
    }

    fn posterior_cdf(&self, coord: usize, x: f64) -> Option<f64> {
        if coord != 0 {
            return None;
        }
        let s = self.likelihood_sd();
        let at = |v: f64| normal_cdf((v - self.xbar) / s);
        let (a, b) = (at(self.lo), at(self.hi));
        Some(((at(x.clamp(self.lo, self.hi)) - a) / (b - a)).clamp(0.0, 1.0))
    }

    fn posterior_moments(&self, coord: usize) -> Option<(f64, f64)> {
        if coord != 0 {
            return None;
        }
        let s = self.likelihood_sd();
        let (a, b) = ((self.lo - self.xbar) / s, (self.hi - self.xbar) / s);
        let pdf = |z: f64| (-0.5 * z * z - LN_SQRT_2PI).exp();
        let mass = normal_cdf(b) - normal_cdf(a);
        let shift = (pdf(a) - pdf(b)) / mass;
        let var = s * s * (1.0 + (a * pdf(a) - b * pdf(b)) / mass - shift * shift);
        Some((self.xbar + s * shift, var))
    }
}

impl OracleModel for FlatGaussian {
    fn prior_log_density(&self, theta: f64) -> f64 {
        if (self.lo..=self.hi).contains(&theta) {
            -(self.hi - self.lo).ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn log_lik(&self, theta: f64) -> f64 {
        self.loglik(theta)
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let s = self.likelihood_sd();
        let mut pts = vec![self.xbar];
        for k in [1.0, 3.0, 6.0, 10.0, 20.0] {
            pts.push(self.xbar - k * s);
            pts.push(self.xbar + k * s);
        }
        pts
    }
}

/// Normal prior with a likelihood that does not depend on the parameter.
/// The posterior equals the prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantLikelihood {
    pub prior_mean: f64,
    pub prior_sd: f64,
    pub log_value: f64,
}

impl ConstantLikelihood {
    pub fn new(prior_mean: f64, prior_sd: f64, log_value: f64) -> Result<Self> {
        check_finite("prior_mean", prior_mean)?;
        check_sd("prior_sd", prior_sd)?;
        check_finite("log_value", log_value)?;
        Ok(Self {
            prior_mean,
            prior_sd,
            log_value,
        })
    }
}

impl Model for ConstantLikelihood {
    fn dim(&self) -> usize {
        1
    }

    fn sample_prior(&self, rng: &mut StreamRng, out: &mut [f64]) {
        let z: f64 = rng.sample(StandardNormal);
        out[0] = self.prior_mean + self.prior_sd * z;
    }

    fn log_likelihood(&self, _theta: &[f64]) -> f64 {
        self.log_value
    }

    fn posterior_cdf(&self, coord: usize, x: f64) -> Option<f64> {
        (coord == 0).then(|| normal_cdf((x - self.prior_mean) / self.prior_sd))
    }

    fn posterior_moments(&self, coord: usize) -> Option<(f64, f64)> {
        (coord == 0).then_some((self.prior_mean, self.prior_sd * self.prior_sd))
    }
}

impl OracleModel for ConstantLikelihood {
    fn prior_log_density(&self, theta: f64) -> f64 {
        let z = (theta - self.prior_mean) / self.prior_sd;
        -LN_SQRT_2PI - self.prior_sd.ln() - 0.5 * z * z
    }

    fn log_lik(&self, _theta: f64) -> f64 {
        self.log_value
    }

    fn support(&self) -> (f64, f64) {
        (self.prior_mean - 40.0 * self.prior_sd, self.prior_mean + 40.0 * self.prior_sd)
    }

    fn breakpoints(&self) -> Vec<f64> {
        [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0]
            .iter()
            .map(|k| self.prior_mean + k * self.prior_sd)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::quadrature::Quadrature;

    #[test]
    fn flat_gaussian_moments_match_quadrature() {
        let m = FlatGaussian::new(-1.0, 0.5, 1.0, 4, 0.3).unwrap();
        let q = Quadrature::default();
        let f = |x: f64, k: i32| x.powi(k) * m.loglik(x).exp();
        let z = q.integrate(|x| f(x, 0), &[-1.0, 0.5]).unwrap().value;
        let mean = q.integrate(|x| f(x, 1), &[-1.0, 0.5]).unwrap().value / z;
        let second = q.integrate(|x| f(x, 2), &[-1.0, 0.5]).unwrap().value / z;
        let (mu, var) = m.posterior_moments(0).unwrap();
        assert!((mu - mean).abs() < 1e-9);
        assert!((var - (second - mean * mean)).abs() < 1e-9);
    }

    #[test]
    fn fig1_posterior() {
        let m = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
        assert_eq!(m.posterior_mean(), 0.5);
        assert_eq!(m.posterior_var(), 0.5);
        assert!((m.posterior_cdf(0, 0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fig2_posterior() {
        let m = GaussianGaussian::new(0.0, 1.0, 1.0, 10_000, 1.0).unwrap();
        assert!((m.posterior_mean() - 1e4 / 10_001.0).abs() < 1e-15);
        assert!((m.posterior_var() - 1.0 / 10_001.0).abs() < 1e-18);
    }

    #[test]
    fn tight_prior_dominates() {
        let m = GaussianGaussian::new(0.0, 0.01, 1.0, 1, 1.0).unwrap();
        assert!(m.posterior_mean().abs() < 1e-3);
    }

    #[test]
    fn likelihood_at_mode_and_fig1_value() {
        let m = GaussianGaussian::new(0.0, 1.0, 2.0, 1, 1.0).unwrap();
        let expected = (1.0 / (2.0 * std::f64::consts::PI * 4.0f64).sqrt()).ln();
        assert!((m.log_likelihood(&[1.0]) - expected).abs() < 1e-15);
        let fig1 = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
        let expected = -0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5;
        assert!((fig1.log_likelihood(&[0.0]) - expected).abs() < 1e-15);
    }

    #[test]
    fn bad_parameters() {
        assert!(GaussianGaussian::new(0.0, 0.0, 1.0, 1, 1.0).is_err());
        assert!(GaussianGaussian::new(0.0, 1.0, -1.0, 1, 1.0).is_err());
        assert!(GaussianGaussian::new(0.0, 1.0, 1.0, 0, 1.0).is_err());
        assert!(FlatGaussian::new(1.0, 1.0, 1.0, 1, 0.0).is_err());
    }

    #[test]
    fn flat_posterior_cdf_is_truncated_normal() {
        let m = FlatGaussian::new(-1.0, 1.0, 1.0, 1, 0.0).unwrap();
        assert_eq!(m.posterior_cdf(0, -1.0), Some(0.0));
        assert_eq!(m.posterior_cdf(0, 5.0), Some(1.0));
        assert!((m.posterior_cdf(0, 0.0).unwrap() - 0.5).abs() < 1e-15);
    }
}
