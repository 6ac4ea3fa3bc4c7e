//! Prior/likelihood pairs the samplers run on, plus benchmark fixtures with
//! analytic posteriors and the quadrature oracle used to check them.

mod beta;
mod gaussian;
mod latent;
pub mod oracle;
pub mod quadrature;

use std::sync::Arc;

use crate::rng::StreamRng;

pub use beta::BetaBernoulli;
pub use gaussian::{ConstantLikelihood, FlatGaussian, GaussianGaussian};
pub use latent::{expand_latent, gaussian_chain, ExpandedModel, LatentExpansionModel};
pub use oracle::{oracle_prior_integrals, OracleModel, PriorIntegrals};

/// A prior we can draw from and a likelihood we can evaluate.
///
/// The observed data are fixed inside the implementation. `log_likelihood`
/// may drop any additive constant that does not depend on `theta`, and may
/// return `-inf` for parameters the data rule out.
pub trait Model: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes one prior draw into `out` (length `dim()`).
    fn sample_prior(&self, rng: &mut StreamRng, out: &mut [f64]);

    fn log_likelihood(&self, theta: &[f64]) -> f64;

    /// Analytic posterior CDF of one coordinate, when known.
    fn posterior_cdf(&self, _coord: usize, _x: f64) -> Option<f64> {
        None
    }

    /// Analytic posterior `(mean, variance)` of one coordinate, when known.
    fn posterior_moments(&self, _coord: usize) -> Option<(f64, f64)> {
        None
    }
}

macro_rules! forward_model {
    ($($ptr:ty),*) => {$(
        impl<M: Model + ?Sized> Model for $ptr {
            fn dim(&self) -> usize { (**self).dim() }
            fn sample_prior(&self, rng: &mut StreamRng, out: &mut [f64]) { (**self).sample_prior(rng, out) }
            fn log_likelihood(&self, theta: &[f64]) -> f64 { (**self).log_likelihood(theta) }
            fn posterior_cdf(&self, coord: usize, x: f64) -> Option<f64> { (**self).posterior_cdf(coord, x) }
            fn posterior_moments(&self, coord: usize) -> Option<(f64, f64)> { (**self).posterior_moments(coord) }
        }
    )*};
}

forward_model!(&M, Box<M>, Arc<M>);

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
