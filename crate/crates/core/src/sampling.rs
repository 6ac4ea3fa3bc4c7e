//! The three prior-sampling schemes.
//!
//! All of them start the same way: draw `n` parameters from the prior and
//! evaluate the log-likelihood of each. LIPS keeps the draws with weights
//! proportional to their likelihoods. LAPS copies each draw
//! `ceil(c · f̃)` times, where `f̃ = exp(ll − max ll)` is the likelihood
//! relative to the best draw. SLIPS resamples `m` draws with replacement
//! using the LIPS weights.
//!
//! Everything is computed from log-likelihoods. Adding a constant to every
//! log-likelihood (multiplying the likelihood by a positive constant) does
//! not change any output.

use rand::Rng;

use crate::batch::{DrawBatch, LogLikelihoods};
use crate::engine::{self, reduce_sum};
use crate::error::{invalid, Error, Result};
use crate::models::Model;
use crate::posterior::{UnweightedPosterior, WeightedPosterior};
use crate::rng::{RngStream, RESAMPLE};

/// Default limit on the size of a LAPS bag.
pub const DEFAULT_COPY_CAP: u64 = 1 << 27;

/// `log Σ exp(vᵢ)`; `-inf` for an empty slice or all `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let shifted: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    max + reduce_sum(&shifted).ln()
}

/// `exp(llᵢ − maxⱼ llⱼ)`: likelihoods relative to the best draw, in `[0, 1]`.
pub fn scaled_likelihoods(ll: &LogLikelihoods) -> Result<Vec<f64>> {
    let max = ll.max();
    if max == f64::NEG_INFINITY {
        return Err(Error::TotalUnderflow { n: ll.len() });
    }
    Ok(ll.as_slice().iter().map(|v| (v - max).exp()).collect())
}

/// Normalised weights together with `log Σ f(θᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWeights {
    pub weights: Vec<f64>,
    pub log_sum: f64,
}

/// `wᵢ = exp(llᵢ − logsumexp(ll))`. Draws with `-inf` log-likelihood get
/// weight exactly 0; all `-inf` is [`Error::TotalUnderflow`].
pub fn normalize_weights(ll: &LogLikelihoods) -> Result<NormalizedWeights> {
    let max = ll.max();
    let mut weights = scaled_likelihoods(ll)?;
    let total = reduce_sum(&weights);
    for w in &mut weights {
        *w /= total;
    }
    Ok(NormalizedWeights {
        weights,
        log_sum: max + total.ln(),
    })
}

/// `n` IID prior draws from the prior sub-stream of `rng`.
pub fn draw_prior(model: &dyn Model, n: usize, rng: &RngStream) -> Result<DrawBatch> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    engine::draw_sharded(model, n, engine::default_shards(), rng)
}

/// Log-likelihood of every draw, in batch order. NaN or `+inf` from the
/// model is an error naming the first offending draw.
pub fn evaluate_log_likelihood(model: &dyn Model, batch: &DrawBatch) -> Result<LogLikelihoods> {
    if batch.dim() != model.dim() {
        return Err(invalid(format!(
            "batch dimension {} does not match model dimension {}",
            batch.dim(),
            model.dim()
        )));
    }
    let n = batch.len();
    let chunks = engine::default_shards().min(n.div_ceil(engine::BLOCK_SIZE)).max(1);
    let parts = engine::run_indexed(chunks, |c| {
        let (start, end) = (c * n / chunks, (c + 1) * n / chunks);
        (start..end)
            .map(|i| {
                let v = model.log_likelihood(batch.get(i));
                if v.is_nan() || v == f64::INFINITY {
                    Err(Error::InvalidLogLikelihood { index: i, value: v })
                } else {
                    Ok(v)
                }
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    LogLikelihoods::new(parts.concat())
}

/// Attaches normalised likelihood weights to a batch.
pub fn weigh(draws: DrawBatch, ll: &LogLikelihoods) -> Result<WeightedPosterior> {
    if draws.len() != ll.len() {
        return Err(invalid(format!("{} log-likelihoods for {} draws", ll.len(), draws.len())));
    }
    let NormalizedWeights { weights, log_sum } = normalize_weights(ll)?;
    Ok(WeightedPosterior::from_parts(draws, weights, log_sum))
}

/// Likelihood importance prior sampling.
pub fn lips(model: &dyn Model, n: usize, rng: &RngStream) -> Result<WeightedPosterior> {
    lips_sharded(model, n, engine::default_shards(), rng)
}

pub fn lips_sharded(model: &dyn Model, n: usize, shards: usize, rng: &RngStream) -> Result<WeightedPosterior> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let (draws, ll) = engine::run_sharded_stream(model, n, shards, rng)?;
    weigh(draws, &ll)
}

fn check_c(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("c must be positive and finite, got {c}")))
    }
}

fn copies_for(scaled: f64, positive: bool, c: f64) -> u64 {
    if !positive {
        0
    } else {
        // f̃ > 0 even when exp underflows, so every live draw keeps one copy.
        ((c * scaled).ceil() as u64).max(1)
    }
}

/// `ceil(c · f̃ᵢ)` for relative likelihoods `f̃ᵢ ∈ [0, 1]`; zero likelihood gives zero copies.
pub fn copy_counts(scaled: &[f64], c: f64) -> Result<Vec<u64>> {
    check_c(c)?;
    if let Some(i) = scaled.iter().position(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(invalid(format!("relative likelihood {i} is {}", scaled[i])));
    }
    Ok(scaled.iter().map(|&s| copies_for(s, s > 0.0, c)).collect())
}

/// LAPS on an existing batch. Fails with [`Error::CopyExplosion`] when the
/// bag would exceed `cap` copies.
pub fn amplify(draws: &DrawBatch, ll: &LogLikelihoods, c: f64, cap: u64) -> Result<UnweightedPosterior> {
    check_c(c)?;
    if draws.len() != ll.len() {
        return Err(invalid(format!("{} log-likelihoods for {} draws", ll.len(), draws.len())));
    }
    let scaled = scaled_likelihoods(ll)?;
    let counts: Vec<u64> = scaled
        .iter()
        .zip(ll.as_slice())
        .map(|(&s, &l)| copies_for(s, l > f64::NEG_INFINITY, c))
        .collect();
    let total = counts.iter().fold(0u64, |acc, &k| acc.saturating_add(k));
    if total > cap {
        let per_copy = (draws.dim() as u64 + 1) * 8;
        return Err(Error::CopyExplosion {
            copies: total,
            bytes: total.saturating_mul(per_copy),
            cap,
        });
    }
    let mut source = Vec::with_capacity(total as usize);
    for (i, &k) in counts.iter().enumerate() {
        source.extend(std::iter::repeat_n(i, k as usize));
    }
    Ok(UnweightedPosterior::with_source(draws.gather(&source), source))
}

/// Likelihood-amplified prior sampling with the default copy cap.
pub fn laps(model: &dyn Model, n: usize, c: f64, rng: &RngStream) -> Result<UnweightedPosterior> {
    laps_with_cap(model, n, c, DEFAULT_COPY_CAP, rng)
}

pub fn laps_with_cap(model: &dyn Model, n: usize, c: f64, cap: u64, rng: &RngStream) -> Result<UnweightedPosterior> {
    check_c(c)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let (draws, ll) = engine::run_sharded_stream(model, n, engine::default_shards(), rng)?;
    amplify(&draws, &ll, c, cap)
}

/// `m` multinomial draws of indices with probabilities proportional to `weights`.
///
/// Inverse CDF with sorted uniforms: `m` uniforms on `[0, 1)` are drawn from
/// `rng`, sorted, scaled by the total weight and matched in one pass against
/// the running sum of the weights; uniform `u` selects the first index whose
/// running sum exceeds `u · total`. Zero-weight indices are never selected.
/// The returned indices are in ascending order.
pub fn multinomial_indices(weights: &[f64], m: usize, rng: &RngStream) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(invalid(format!("weight {i} is {}", weights[i])));
    }
    let Some(last_live) = weights.iter().rposition(|&w| w > 0.0) else {
        return Err(Error::TotalUnderflow { n: weights.len() });
    };
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut running = 0.0;
    for &w in weights {
        running += w;
        cumulative.push(running);
    }
    let total = running;

    let mut r = rng.rng();
    let mut uniforms: Vec<f64> = (0..m).map(|_| r.random::<f64>()).collect();
    uniforms.sort_unstable_by(f64::total_cmp);

    let mut out = Vec::with_capacity(m);
    let mut j = 0;
    for u in uniforms {
        let target = u * total;
        while j < last_live && cumulative[j] <= target {
            j += 1;
        }
        out.push(j);
    }
    Ok(out)
}

/// SLIPS resampling step on an existing weighted posterior; `rng` is used as is.
pub fn resample(post: &WeightedPosterior, m: usize, rng: &RngStream) -> Result<UnweightedPosterior> {
    let idx = multinomial_indices(post.weights(), m, rng)?;
    Ok(UnweightedPosterior::with_source(post.draws().gather(&idx), idx))
}

/// Selective likelihood-amplified prior sampling. Prior draws come from the
/// prior sub-stream of `rng`, resampling from its resampling sub-stream.
pub fn slips(model: &dyn Model, n: usize, m: usize, rng: &RngStream) -> Result<UnweightedPosterior> {
    slips_sharded(model, n, m, engine::default_shards(), rng)
}

pub fn slips_sharded(model: &dyn Model, n: usize, m: usize, shards: usize, rng: &RngStream) -> Result<UnweightedPosterior> {
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    let weighted = lips_sharded(model, n, shards, rng)?;
    resample(&weighted, m, &rng.child(RESAMPLE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{BetaBernoulli, ConstantLikelihood, GaussianGaussian};
    use crate::posterior::{posterior_expectation, posterior_probability};

    fn ll(v: &[f64]) -> LogLikelihoods {
        LogLikelihoods::new(v.to_vec()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let w = normalize_weights(&ll(&[0.0, 0.0, 0.0])).unwrap().weights;
        assert!(w.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        let w = normalize_weights(&ll(&[1f64.ln(), 3f64.ln()])).unwrap().weights;
        assert!((w[0] - 0.25).abs() < 1e-15 && (w[1] - 0.75).abs() < 1e-15);
        let w = normalize_weights(&ll(&[1f64.ln() + 100.0, 3f64.ln() + 100.0])).unwrap().weights;
        assert!((w[0] - 0.25).abs() < 1e-15 && (w[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn neg_inf_gets_zero_weight_and_all_neg_inf_errors() {
        let w = normalize_weights(&ll(&[f64::NEG_INFINITY, 0.0])).unwrap().weights;
        assert_eq!(w, vec![0.0, 1.0]);
        assert_eq!(
            normalize_weights(&ll(&[f64::NEG_INFINITY; 3])),
            Err(Error::TotalUnderflow { n: 3 })
        );
    }

    #[test]
    fn log_sum_is_log_of_likelihood_sum() {
        let nw = normalize_weights(&ll(&[1f64.ln(), 3f64.ln()])).unwrap();
        assert!((nw.log_sum - 4f64.ln()).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn copy_count_examples() {
        assert_eq!(copy_counts(&[0.2, 0.5, 1.0], 10.0).unwrap(), vec![2, 5, 10]);
        assert_eq!(copy_counts(&[0.0, 1e-300, 1.0], 10.0).unwrap(), vec![0, 1, 10]);
        assert!(copy_counts(&[1.0], 0.0).is_err());
        assert!(copy_counts(&[1.0], f64::NAN).is_err());
    }

    #[test]
    fn single_draw_is_repeated_ceil_c_times() {
        let draws = DrawBatch::from_scalars(vec![0.7]).unwrap();
        for c in [0.3, 1.0, 2.5, 17.0] {
            let bag = amplify(&draws, &ll(&[-3.0]), c, DEFAULT_COPY_CAP).unwrap();
            assert_eq!(bag.len() as f64, c.ceil());
            assert!(bag.draws().coords().iter().all(|&x| x == 0.7));
        }
    }

    #[test]
    fn amplify_skips_impossible_draws_and_keeps_underflowed_ones() {
        let draws = DrawBatch::from_scalars(vec![1.0, 2.0, 3.0]).unwrap();
        let bag = amplify(&draws, &ll(&[f64::NEG_INFINITY, -2000.0, 0.0]), 4.0, 100).unwrap();
        assert_eq!(bag.copy_counts(3).unwrap(), vec![0, 1, 4]);
    }

    #[test]
    fn copy_explosion_reports_size() {
        let draws = DrawBatch::from_scalars(vec![1.0, 2.0]).unwrap();
        match amplify(&draws, &ll(&[0.0, 0.0]), 1e6, 1000) {
            Err(Error::CopyExplosion { copies, bytes, cap }) => {
                assert_eq!(copies, 2_000_000);
                assert_eq!(bytes, 2_000_000 * 16);
                assert_eq!(cap, 1000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_weights_resample_one_draw() {
        let idx = multinomial_indices(&[1.0, 0.0, 0.0], 500, &RngStream::new(1)).unwrap();
        assert!(idx.iter().all(|&i| i == 0));
        let idx = multinomial_indices(&[0.0, 0.0, 2.0, 0.0], 500, &RngStream::new(1)).unwrap();
        assert!(idx.iter().all(|&i| i == 2));
        assert!(multinomial_indices(&[0.0, 0.0], 5, &RngStream::new(1)).is_err());
        assert!(multinomial_indices(&[1.0], 0, &RngStream::new(1)).is_err());
    }

    #[test]
    fn constant_likelihood_gives_uniform_weights() {
        let m = ConstantLikelihood::new(0.0, 1.0, -7.5).unwrap();
        let post = lips(&m, 1000, &RngStream::new(3)).unwrap();
        assert!(post.weights().iter().all(|&w| (w - 1e-3).abs() < 1e-15));
        let prior_freq = post.draws().iter().filter(|t| t[0] <= 0.3).count() as f64 / 1000.0;
        assert!((posterior_probability(&post, |t| t[0] <= 0.3) - prior_freq).abs() < 1e-12);
    }

    #[test]
    fn lips_gaussian_moments() {
        let m = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
        let post = lips(&m, 100_000, &RngStream::new(17)).unwrap();
        let e = posterior_expectation(&post, |t| vec![t[0], t[0] * t[0]]).unwrap();
        assert!((e[0] - 0.5).abs() < 0.02, "{e:?}");
        assert!((e[1] - 0.75).abs() < 0.03, "{e:?}");
        let median = posterior_probability(&post, |t| t[0] <= 0.5);
        assert!((median - 0.5).abs() < 0.02, "{median}");
        let sum: f64 = post.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lips_beta_bernoulli_mean() {
        let m = BetaBernoulli::new(1.0, 1.0, 2, 2).unwrap();
        let post = lips(&m, 100_000, &RngStream::new(5)).unwrap();
        let mean = posterior_expectation(&post, |t| vec![t[0]]).unwrap()[0];
        assert!((mean - 0.75).abs() < 0.01, "{mean}");
    }

    #[test]
    fn draw_prior_moments_and_determinism() {
        let m = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
        let b = draw_prior(&m, 10_000, &RngStream::new(9)).unwrap();
        let n = b.len() as f64;
        let mean = b.coords().iter().sum::<f64>() / n;
        let var = b.coords().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 4.0 / 100.0, "{mean}");
        assert!((var - 1.0).abs() < 0.1, "{var}");
        assert_eq!(draw_prior(&m, 10_000, &RngStream::new(9)).unwrap(), b);
        assert_eq!(draw_prior(&m, 1, &RngStream::new(9)).unwrap().len(), 1);
        assert!(draw_prior(&m, 0, &RngStream::new(9)).is_err());
    }

    #[test]
    fn evaluate_matches_engine() {
        let m = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
        let (b, l) = engine::run_sharded(&m, 5000, 3, 4).unwrap();
        assert_eq!(evaluate_log_likelihood(&m, &b).unwrap(), l);
    }

    #[test]
    fn slips_and_lips_share_prior_batch() {
        let m = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
        let rng = RngStream::new(21);
        let w = lips(&m, 2000, &rng).unwrap();
        let s = slips(&m, 2000, 3000, &rng).unwrap();
        assert_eq!(s.len(), 3000);
        for (i, &src) in s.source_indices().unwrap().iter().enumerate() {
            assert_eq!(s.draws().get(i), w.draws().get(src));
            assert!(w.weights()[src] > 0.0);
        }
    }
}
