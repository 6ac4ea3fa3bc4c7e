use crate::batch::DrawBatch;
use crate::engine::reduce_sum;
use crate::error::{invalid, Error, Result};

/// A discrete measure on the draws of a batch: what every posterior
/// approximation in this crate is.
pub trait EmpiricalMeasure {
    fn draws(&self) -> &DrawBatch;

    /// Unnormalised mass of each draw, aligned with [`EmpiricalMeasure::draws`].
    fn masses(&self) -> std::borrow::Cow<'_, [f64]>;
}

/// Prior draws with normalised likelihood weights (the LIPS output).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPosterior {
    draws: DrawBatch,
    weights: Vec<f64>,
    log_normalizer: Option<f64>,
}

impl WeightedPosterior {
    /// Weights must be finite, non-negative, aligned with `draws`, with a positive sum.
    pub fn new(draws: DrawBatch, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != draws.len() {
            return Err(invalid(format!("{} weights for {} draws", weights.len(), draws.len())));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid(format!("weight {i} is {} (must be finite and >= 0)", weights[i])));
        }
        if !(reduce_sum(&weights) > 0.0) {
            return Err(Error::TotalUnderflow { n: weights.len() });
        }
        Ok(Self {
            draws,
            weights,
            log_normalizer: None,
        })
    }

    pub(crate) fn from_parts(draws: DrawBatch, weights: Vec<f64>, log_normalizer: f64) -> Self {
        Self {
            draws,
            weights,
            log_normalizer: Some(log_normalizer),
        }
    }

    pub fn draws(&self) -> &DrawBatch {
        &self.draws
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `log Σᵢ f(θᵢ)` of the log-likelihoods the weights came from, when known.
    pub fn log_normalizer(&self) -> Option<f64> {
        self.log_normalizer
    }

    /// Marginal over the first `k` coordinates: the same weights on projected draws.
    pub fn marginal(&self, k: usize) -> Result<Self> {
        Ok(Self {
            draws: self.draws.project(k)?,
            weights: self.weights.clone(),
            log_normalizer: self.log_normalizer,
        })
    }
}

impl EmpiricalMeasure for WeightedPosterior {
    fn draws(&self) -> &DrawBatch {
        &self.draws
    }

    fn masses(&self) -> std::borrow::Cow<'_, [f64]> {
        std::borrow::Cow::Borrowed(&self.weights)
    }
}

/// An equally weighted bag of draws (the LAPS and SLIPS outputs).
#[derive(Debug, Clone, PartialEq)]
pub struct UnweightedPosterior {
    draws: DrawBatch,
    source: Option<Vec<usize>>,
}

impl UnweightedPosterior {
    pub fn new(draws: DrawBatch) -> Self {
        Self { draws, source: None }
    }

    pub(crate) fn with_source(draws: DrawBatch, source: Vec<usize>) -> Self {
        debug_assert_eq!(draws.len(), source.len());
        Self {
            draws,
            source: Some(source),
        }
    }

    pub fn draws(&self) -> &DrawBatch {
        &self.draws
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Index into the source batch of every member, when the bag was built by this crate.
    pub fn source_indices(&self) -> Option<&[usize]> {
        self.source.as_deref()
    }

    /// Fraction of the bag taken by each of the `n_source` source draws.
    pub fn source_frequencies(&self, n_source: usize) -> Option<Vec<f64>> {
        let source = self.source.as_ref()?;
        let mut counts = vec![0u64; n_source];
        for &i in source {
            counts[i] += 1;
        }
        let m = source.len() as f64;
        Some(counts.into_iter().map(|c| c as f64 / m).collect())
    }

    /// Copies of each source draw, when provenance is known.
    pub fn copy_counts(&self, n_source: usize) -> Option<Vec<u64>> {
        let source = self.source.as_ref()?;
        let mut counts = vec![0u64; n_source];
        for &i in source {
            counts[i] += 1;
        }
        Some(counts)
    }

    pub fn marginal(&self, k: usize) -> Result<Self> {
        Ok(Self {
            draws: self.draws.project(k)?,
            source: self.source.clone(),
        })
    }
}

impl EmpiricalMeasure for UnweightedPosterior {
    fn draws(&self) -> &DrawBatch {
        &self.draws
    }

    fn masses(&self) -> std::borrow::Cow<'_, [f64]> {
        std::borrow::Cow::Owned(vec![1.0; self.draws.len()])
    }
}

/// Posterior probability of the set `{θ : indicator(θ)}`: the mass inside
/// over the total mass. Exactly 1 for the whole space and 0 for the empty set.
pub fn posterior_probability<P, F>(post: &P, indicator: F) -> f64
where
    P: EmpiricalMeasure + ?Sized,
    F: Fn(&[f64]) -> bool,
{
    let masses = post.masses();
    let inside: Vec<f64> = post
        .draws()
        .iter()
        .zip(masses.iter())
        .map(|(theta, &w)| if indicator(theta) { w } else { 0.0 })
        .collect();
    reduce_sum(&inside) / reduce_sum(&masses)
}

/// Posterior mean of a vector-valued function of the parameter.
pub fn posterior_expectation<P, G>(post: &P, g: G) -> Result<Vec<f64>>
where
    P: EmpiricalMeasure + ?Sized,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let masses = post.masses();
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(masses.len());
    let mut width = None;
    for (i, theta) in post.draws().iter().enumerate() {
        let v = g(theta);
        if v.iter().any(|x| x.is_nan()) {
            return Err(Error::NanValue { index: i });
        }
        match width {
            None => width = Some(v.len()),
            Some(k) if k != v.len() => {
                return Err(invalid(format!("function returned {} values at draw {i}, expected {k}", v.len())))
            }
            _ => {}
        }
        values.push(v);
    }
    let total = reduce_sum(&masses);
    let mut column = vec![0.0; masses.len()];
    Ok((0..width.unwrap_or(0))
        .map(|j| {
            for ((slot, v), &w) in column.iter_mut().zip(&values).zip(masses.iter()) {
                *slot = w * v[j];
            }
            reduce_sum(&column) / total
        })
        .collect())
}
