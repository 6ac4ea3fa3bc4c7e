use rand::Rng;
use statrs::distribution::{Beta as BetaDist, ContinuousCDF};

use super::{Model, OracleModel};
use crate::error::{invalid, Result};
use crate::rng::StreamRng;

/// Beta prior on a success probability, Bernoulli data summarised by
/// `successes` out of `trials`.
#[derive(Debug, Clone)]
pub struct BetaBernoulli {
    pub alpha: f64,
    pub beta: f64,
    pub successes: u64,
    pub trials: u64,
    prior: rand_distr::Beta<f64>,
    posterior: BetaDist,
}

impl PartialEq for BetaBernoulli {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha
            && self.beta == other.beta
            && self.successes == other.successes
            && self.trials == other.trials
    }
}

impl BetaBernoulli {
    pub fn new(alpha: f64, beta: f64, successes: u64, trials: u64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(invalid(format!("Beta shapes must be positive, got ({alpha}, {beta})")));
        }
        if successes > trials {
            return Err(invalid(format!("{successes} successes out of {trials} trials")));
        }
        let prior = rand_distr::Beta::new(alpha, beta).map_err(|e| invalid(e.to_string()))?;
        let (a, b) = (alpha + successes as f64, beta + (trials - successes) as f64);
        let posterior = BetaDist::new(a, b).map_err(|e| invalid(e.to_string()))?;
        Ok(Self {
            alpha,
            beta,
            successes,
            trials,
            prior,
            posterior,
        })
    }

    /// Shapes of the conjugate posterior.
    pub fn posterior_shapes(&self) -> (f64, f64) {
        (
            self.alpha + self.successes as f64,
            self.beta + (self.trials - self.successes) as f64,
        )
    }

    fn loglik(&self, p: f64) -> f64 {
        if !(0.0..=1.0).contains(&p) {
            return f64::NEG_INFINITY;
        }
        let failures = self.trials - self.successes;
        let mut ll = 0.0;
        if self.successes > 0 {
            ll += self.successes as f64 * p.ln();
        }
        if failures > 0 {
            ll += failures as f64 * (-p).ln_1p();
        }
        ll
    }
}

impl Model for BetaBernoulli {
    fn dim(&self) -> usize {
        1
    }

    fn sample_prior(&self, rng: &mut StreamRng, out: &mut [f64]) {
        out[0] = rng.sample(self.prior);
    }

    fn log_likelihood(&self, theta: &[f64]) -> f64 {
        self.loglik(theta[0])
    }

    fn posterior_cdf(&self, coord: usize, x: f64) -> Option<f64> {
        (coord == 0).then(|| self.posterior.cdf(x.clamp(0.0, 1.0)))
    }

    fn posterior_moments(&self, coord: usize) -> Option<(f64, f64)> {
        let (a, b) = self.posterior_shapes();
        (coord == 0).then(|| (a / (a + b), a * b / ((a + b) * (a + b) * (a + b + 1.0))))
    }
}

impl OracleModel for BetaBernoulli {
    fn prior_log_density(&self, p: f64) -> f64 {
        if !(0.0..=1.0).contains(&p) {
            return f64::NEG_INFINITY;
        }
        (self.alpha - 1.0) * p.ln() + (self.beta - 1.0) * (-p).ln_1p()
            - statrs::function::beta::ln_beta(self.alpha, self.beta)
    }

    fn log_lik(&self, p: f64) -> f64 {
        self.loglik(p)
    }

    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let (mean, var) = self.posterior_moments(0).unwrap();
        let sd = var.sqrt();
        let mut pts = vec![mean, 0.5];
        for k in [1.0, 3.0, 6.0] {
            pts.push(mean - k * sd);
            pts.push(mean + k * sd);
        }
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_data_posterior_is_prior() {
        let m = BetaBernoulli::new(1.0, 1.0, 0, 0).unwrap();
        assert_eq!(m.posterior_shapes(), (1.0, 1.0));
        assert!((m.posterior_cdf(0, 0.3).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(m.log_likelihood(&[0.0]), 0.0);
    }

    #[test]
    fn two_heads() {
        let m = BetaBernoulli::new(1.0, 1.0, 2, 2).unwrap();
        assert_eq!(m.posterior_shapes(), (3.0, 1.0));
        assert_eq!(m.posterior_moments(0).unwrap().0, 0.75);
        // Beta(3,1) has CDF x³.
        assert!((m.posterior_cdf(0, 0.5).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn endpoints_and_outside_support() {
        let m = BetaBernoulli::new(1.0, 1.0, 3, 5).unwrap();
        assert_eq!(m.log_likelihood(&[0.0]), f64::NEG_INFINITY);
        assert_eq!(m.log_likelihood(&[1.0]), f64::NEG_INFINITY);
        assert_eq!(m.log_likelihood(&[1.5]), f64::NEG_INFINITY);
        let all_heads = BetaBernoulli::new(1.0, 1.0, 4, 4).unwrap();
        assert_eq!(all_heads.log_likelihood(&[1.0]), 0.0);
    }

    #[test]
    fn invalid_counts() {
        assert!(BetaBernoulli::new(1.0, 1.0, 3, 2).is_err());
        assert!(BetaBernoulli::new(0.0, 1.0, 0, 2).is_err());
    }
}
