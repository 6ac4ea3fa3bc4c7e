//! How good is a likelihood-weighted prior sample?
//!
//! With `n` prior draws the weighted estimate of a posterior probability
//! has `n · Var → [Π₀(f²)Π₁(A)² + Π₀(f²1_A)(1 − 2Π₁(A))] / Π₀(f)²`, which
//! never exceeds `2 Π₀(f²)/Π₀(f)² = 2 exp D₂(Π₁‖Π₀)`. The functions here
//! estimate those quantities from a single batch of log-likelihoods, check
//! them by brute-force replication, and measure distance to a known
//! posterior CDF.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::batch::LogLikelihoods;
use crate::engine::{self, reduce_sum};
use crate::error::{invalid, Error, Result};
use crate::models::Model;
use crate::posterior::{posterior_probability, EmpiricalMeasure};
use crate::rng::{RngStream, REPLICATE, SWEEP};
use crate::sampling::normalize_weights;

/// Effective sample size `1 / Σ wᵢ²` of normalised weights.
pub fn ess(weights: &[f64]) -> f64 {
    let squares: Vec<f64> = weights.iter().map(|w| w * w).collect();
    1.0 / reduce_sum(&squares)
}

struct Moments {
    ln_n: f64,
    /// `ln Σ exp(llᵢ − max)`
    ln_s1: f64,
    /// `ln Σ exp(2(llᵢ − max))`
    ln_s2: f64,
}

fn moments(ll: &LogLikelihoods) -> Result<(Moments, Vec<f64>)> {
    let max = ll.max();
    if max == f64::NEG_INFINITY {
        return Err(Error::TotalUnderflow { n: ll.len() });
    }
    let scaled: Vec<f64> = ll.as_slice().iter().map(|v| (v - max).exp()).collect();
    let squared: Vec<f64> = ll.as_slice().iter().map(|v| (2.0 * (v - max)).exp()).collect();
    let m = Moments {
        ln_n: (ll.len() as f64).ln(),
        ln_s1: reduce_sum(&scaled).ln(),
        ln_s2: reduce_sum(&squared).ln(),
    };
    Ok((m, scaled))
}

/// Plug-in `D₂(Π₁‖Π₀) = log Π₀(f²)/Π₀(f)²` from one batch: `log(n Σ wᵢ²)`,
/// i.e. `log(n / ess)`. Never negative.
pub fn d2_hat(ll: &LogLikelihoods) -> Result<f64> {
    let (m, _) = moments(ll)?;
    Ok((m.ln_n + m.ln_s2 - 2.0 * m.ln_s1).max(0.0))
}

/// Limit bound on `n · Var(Π̂₁(A))`, uniform over sets: `2 exp(d2)`.
pub fn variance_bound(d2: f64) -> f64 {
    2.0 * d2.exp()
}

/// Plug-in asymptotic variance of the weighted estimate of `Π₁(A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    /// Estimate, clamped at 0.
    pub value: f64,
    /// The same before clamping.
    pub raw: f64,
    /// `Π̂₁(A)`, standing in for `Π₁(A)`.
    pub posterior_prob: f64,
}

pub fn asymptotic_variance_parts(ll: &LogLikelihoods, in_a: &[bool]) -> Result<VarianceEstimate> {
    if in_a.len() != ll.len() {
        return Err(invalid(format!("{} set indicators for {} draws", in_a.len(), ll.len())));
    }
    let (m, scaled) = moments(ll)?;
    let max = ll.max();
    let masked: Vec<f64> = scaled.iter().zip(in_a).map(|(&s, &a)| if a { s } else { 0.0 }).collect();
    let squared_in_a: Vec<f64> = ll
        .as_slice()
        .iter()
        .zip(in_a)
        .map(|(&v, &a)| if a { (2.0 * (v - max)).exp() } else { 0.0 })
        .collect();
    let p = reduce_sum(&masked) / reduce_sum(&scaled);
    // n Π̂₀(f²)/Π̂₀(f)² and n Π̂₀(f²1_A)/Π̂₀(f)², formed as log ratios.
    let ratio_all = (m.ln_n + m.ln_s2 - 2.0 * m.ln_s1).exp();
    let ratio_a = (m.ln_n + reduce_sum(&squared_in_a).ln() - 2.0 * m.ln_s1).exp();
    let raw = ratio_all * p * p + ratio_a * (1.0 - 2.0 * p);
    let value = if raw < 0.0 {
        warn!("plug-in asymptotic variance {raw:e} is negative; clamping to 0");
        0.0
    } else {
        raw
    };
    Ok(VarianceEstimate {
        value,
        raw,
        posterior_prob: p,
    })
}

/// Plug-in limit of `n · Var(Π̂₁(A))`, clamped at 0.
pub fn asymptotic_variance_hat(ll: &LogLikelihoods, in_a: &[bool]) -> Result<f64> {
    asymptotic_variance_parts(ll, in_a).map(|v| v.value)
}

/// Outcome of repeating LIPS on independent batches.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationStudy {
    pub n: usize,
    /// `Π̂₁(A)` per replicate.
    pub estimates: Vec<f64>,
    /// Plug-in `D₂` per replicate.
    pub d2_hats: Vec<f64>,
    /// `n` times the sample variance (denominator `reps − 1`) of `estimates`.
    pub scaled_variance: f64,
}

impl ReplicationStudy {
    pub fn mean_d2_hat(&self) -> f64 {
        reduce_sum(&self.d2_hats) / self.d2_hats.len() as f64
    }
}

/// `n · Var(Π̂₁(A))` over `reps` independent LIPS runs. Replicate `r` uses
/// the stream `rng.child(REPLICATE).child(r)`; results do not depend on
/// scheduling.
pub fn replication_variance_study<F>(
    model: &dyn Model,
    n: usize,
    in_a: F,
    reps: usize,
    rng: &RngStream,
) -> Result<ReplicationStudy>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    if reps < 30 {
        return Err(invalid(format!("a replication study needs at least 30 replicates, got {reps}")));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let base = rng.child(REPLICATE);
    let runs = engine::run_indexed(reps, |r| {
        let stream = base.child(r as u64);
        let (draws, ll) = engine::run_sharded_stream(model, n, 1, &stream)?;
        let post = crate::sampling::weigh(draws, &ll)?;
        Ok((posterior_probability(&post, &in_a), d2_hat(&ll)?))
    })?;
    let (estimates, d2_hats): (Vec<f64>, Vec<f64>) = runs.into_iter().unzip();
    let mean = reduce_sum(&estimates) / reps as f64;
    let dev: Vec<f64> = estimates.iter().map(|e| (e - mean) * (e - mean)).collect();
    let var = reduce_sum(&dev) / (reps - 1) as f64;
    Ok(ReplicationStudy {
        n,
        estimates,
        d2_hats,
        scaled_variance: n as f64 * var,
    })
}

/// Kolmogorov–Smirnov distance between the (weighted) empirical CDF of one
/// coordinate and `cdf`: the largest gap at either side of any jump.
pub fn ks_distance<P, F>(post: &P, cdf: F, coord: usize) -> f64
where
    P: EmpiricalMeasure + ?Sized,
    F: Fn(f64) -> f64,
{
    let draws = post.draws();
    assert!(coord < draws.dim(), "coordinate {coord} out of range");
    let masses = post.masses();
    let mut points: Vec<(f64, f64)> = draws.iter().map(|t| t[coord]).zip(masses.iter().copied()).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total = reduce_sum(&masses);
    let mut cum = 0.0;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < points.len() {
        let x = points[i].0;
        let before = cum / total;
        while i < points.len() && points[i].0 == x {
            cum += points[i].1;
            i += 1;
        }
        let after = cum / total;
        let f = cdf(x);
        sup = sup.max((before - f).abs()).max((after - f).abs());
    }
    sup.min(1.0)
}

/// One grid point of a high-information sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub d2_hat: f64,
    /// `exp(d2_hat)`, the plug-in `Π₀(f²)/Π₀(f)²`.
    pub ratio: f64,
    /// `ess / n`.
    pub ess_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub result: Result<SweepPoint>,
}

/// Plug-in `Π₀(f²)/Π₀(f)²` as the data become more informative.
///
/// `family(t)` builds the model at information level `t` (same prior,
/// sharper likelihood). Grid point `i` draws from `rng.child(SWEEP).child(i)`.
/// A failure at one `t` (typically [`Error::TotalUnderflow`] when `n` is too
/// small for the likelihood's width) is recorded in that row and the sweep
/// continues.
pub fn high_information_sweep<M, F>(family: F, t_grid: &[f64], n: usize, rng: &RngStream) -> Result<Vec<SweepRow>>
where
    M: Model,
    F: Fn(f64) -> Result<M>,
{
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("t grid must be strictly increasing"));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let base = rng.child(SWEEP);
    Ok(t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let result = family(t).and_then(|model| {
                let (_, ll) = engine::run_sharded_stream(&model, n, engine::default_shards(), &base.child(i as u64))?;
                let d2 = d2_hat(&ll)?;
                Ok(SweepPoint {
                    d2_hat: d2,
                    ratio: d2.exp(),
                    ess_fraction: (-d2).exp(),
                })
            });
            SweepRow { t, result }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetVariance {
    pub set: String,
    pub variance: f64,
}

/// Summary of one weighted sample, serialised as a flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub ess: f64,
    pub d2_hat: f64,
    pub variance_bound: f64,
    pub per_set_variance: Option<Vec<SetVariance>>,
    pub ks: Option<f64>,
    pub n: usize,
}

impl DiagnosticsReport {
    /// `sets` pairs a label with per-draw membership.
    pub fn from_log_likelihoods(ll: &LogLikelihoods, sets: &[(String, Vec<bool>)]) -> Result<Self> {
        let weights = normalize_weights(ll)?.weights;
        let d2 = d2_hat(ll)?;
        let per_set_variance = if sets.is_empty() {
            None
        } else {
            Some(
                sets.iter()
                    .map(|(label, in_a)| {
                        Ok(SetVariance {
                            set: label.clone(),
                            variance: asymptotic_variance_hat(ll, in_a)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        Ok(Self {
            ess: ess(&weights).min(ll.len() as f64),
            d2_hat: d2,
            variance_bound: variance_bound(d2),
            per_set_variance,
            ks: None,
            n: ll.len(),
        })
    }

    pub fn with_ks(mut self, ks: f64) -> Self {
        self.ks = Some(ks);
        self
    }
}
