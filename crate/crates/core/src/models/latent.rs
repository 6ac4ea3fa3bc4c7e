//! Parameter-space expansion for likelihoods that integrate out a latent
//! variable.
//!
//! When `f(theta) = ∫ p(x | y, theta) p(y | theta) dy` is intractable but
//! `p(y | theta)` is easy to simulate, draw `(theta, y)` jointly from the
//! prior and use `p(x | y, theta)` as the likelihood. Posterior questions
//! about `theta` alone are then answered on sets of the form `A × Υ`, i.e. by
//! dropping the latent coordinates (see [`crate::WeightedPosterior::marginal`]).

use rand::Rng;
use rand_distr::StandardNormal;

use super::{normal_cdf, Model, LN_SQRT_2PI};
use crate::error::{invalid, Result};
use crate::rng::StreamRng;

type PriorFn = dyn Fn(&mut StreamRng, &mut [f64]) + Send + Sync;
type LatentFn = dyn Fn(&[f64], &mut StreamRng, &mut [f64]) + Send + Sync;
type CondLikFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;
type CdfFn = dyn Fn(usize, f64) -> f64 + Send + Sync;

pub struct LatentExpansionModel {
    theta_dim: usize,
    latent_dim: usize,
    base_prior: Box<PriorFn>,
    latent_sampler: Box<LatentFn>,
    conditional_log_likelihood: Box<CondLikFn>,
    theta_posterior_cdf: Option<Box<CdfFn>>,
}

impl std::fmt::Debug for LatentExpansionModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LatentExpansionModel")
            .field("theta_dim", &self.theta_dim)
            .field("latent_dim", &self.latent_dim)
            .finish_non_exhaustive()
    }
}

impl LatentExpansionModel {
    /// `base_prior(rng, theta)` fills a prior draw of `theta`;
    /// `latent_sampler(theta, rng, y)` fills a draw of `y | theta`;
    /// `conditional_log_likelihood(theta, y)` is `log p(x | y, theta)`.
    pub fn new<P, L, C>(
        theta_dim: usize,
        latent_dim: usize,
        base_prior: P,
        latent_sampler: L,
        conditional_log_likelihood: C,
    ) -> Result<Self>
    where
        P: Fn(&mut StreamRng, &mut [f64]) + Send + Sync + 'static,
        L: Fn(&[f64], &mut StreamRng, &mut [f64]) + Send + Sync + 'static,
        C: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        if theta_dim == 0 {
            return Err(invalid("theta dimension must be at least 1"));
        }
        Ok(Self {
            theta_dim,
            latent_dim,
            base_prior: Box::new(base_prior),
            latent_sampler: Box::new(latent_sampler),
            conditional_log_likelihood: Box::new(conditional_log_likelihood),
            theta_posterior_cdf: None,
        })
    }

    /// Attaches the analytic marginal posterior CDF of `theta`, for testing.
    pub fn with_theta_posterior_cdf<F>(mut self, cdf: F) -> Self
    where
        F: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        self.theta_posterior_cdf = Some(Box::new(cdf));
        self
    }
}

/// A [`LatentExpansionModel`] seen as an ordinary model over `Θ × Υ`.
/// Coordinates `0..theta_dim` are `theta`, the rest are the latent draw.
#[derive(Debug)]
pub struct ExpandedModel {
    inner: LatentExpansionModel,
}

impl ExpandedModel {
    pub fn theta_dim(&self) -> usize {
        self.inner.theta_dim
    }

    pub fn latent_dim(&self) -> usize {
        self.inner.latent_dim
    }
}

pub fn expand_latent(model: LatentExpansionModel) -> ExpandedModel {
    ExpandedModel { inner: model }
}

impl Model for ExpandedModel {
    fn dim(&self) -> usize {
        self.inner.theta_dim + self.inner.latent_dim
    }

    fn sample_prior(&self, rng: &mut StreamRng, out: &mut [f64]) {
        let (theta, y) = out.split_at_mut(self.inner.theta_dim);
        (self.inner.base_prior)(rng, theta);
        (self.inner.latent_sampler)(theta, rng, y);
    }

    fn log_likelihood(&self, point: &[f64]) -> f64 {
        let (theta, y) = point.split_at(self.inner.theta_dim);
        (self.inner.conditional_log_likelihood)(theta, y)
    }

    fn posterior_cdf(&self, coord: usize, x: f64) -> Option<f64> {
        if coord >= self.inner.theta_dim {
            return None;
        }
        self.inner.theta_posterior_cdf.as_ref().map(|cdf| cdf(coord, x))
    }
}

/// `theta ~ N(0, 1)`, `y | theta ~ N(theta, 1)`, `x | y ~ N(y, 1)`, observed `x`.
///
/// Integrating out `y` gives `x | theta ~ N(theta, 2)`, so the marginal
/// posterior of `theta` is `N(x/3, 2/3)`.
pub fn gaussian_chain(x: f64) -> Result<LatentExpansionModel> {
    if !x.is_finite() {
        return Err(invalid("observation must be finite"));
    }
    let model = LatentExpansionModel::new(
        1,
        1,
        |rng, theta| theta[0] = rng.sample::<f64, _>(StandardNormal),
        |theta, rng, y| y[0] = theta[0] + rng.sample::<f64, _>(StandardNormal),
        move |_theta, y| {
            let z = x - y[0];
            -LN_SQRT_2PI - 0.5 * z * z
        },
    )?;
    let (mean, sd) = (x / 3.0, (2.0f64 / 3.0).sqrt());
    Ok(model.with_theta_posterior_cdf(move |_, v| normal_cdf((v - mean) / sd)))
}
