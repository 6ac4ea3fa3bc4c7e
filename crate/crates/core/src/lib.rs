//! Posterior approximation by sampling from the prior.
//!
//! Draw parameters from the prior, evaluate the likelihood of each draw,
//! and either weight the draws by likelihood ([`lips`]), copy each draw a
//! number of times proportional to its likelihood ([`laps`]), or resample
//! the weighted draws ([`slips`]). No Markov chain, no tuning; the only
//! distribution sampled from is the prior.
//!
//! ```
//! use priorpost::{lips, posterior_probability, models::GaussianGaussian, RngStream};
//!
//! // N(0, 1) prior, one N(θ, 1) observation at x = 1: posterior N(0.5, 0.5).
//! let model = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
//! let post = lips(&model, 50_000, &RngStream::new(7)).unwrap();
//! let below_median = posterior_probability(&post, |theta| theta[0] <= 0.5);
//! assert!((below_median - 0.5).abs() < 0.03);
//! ```

mod batch;
pub mod diagnostics;
pub mod engine;
mod error;
pub mod io;
pub mod models;
mod posterior;
pub mod rng;
mod sampling;

pub use batch::{DrawBatch, LogLikelihoods, SeedInfo};
pub use error::{Error, Result};
pub use models::Model;
pub use posterior::{posterior_expectation, posterior_probability, EmpiricalMeasure, UnweightedPosterior, WeightedPosterior};
pub use rng::RngStream;
pub use sampling::{
    amplify, copy_counts, draw_prior, evaluate_log_likelihood, laps, laps_with_cap, lips, lips_sharded, log_sum_exp,
    multinomial_indices, normalize_weights, resample, scaled_likelihoods, slips, slips_sharded, weigh, NormalizedWeights,
    DEFAULT_COPY_CAP,
};
