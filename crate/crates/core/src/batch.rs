use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

/// Where a batch of prior draws came from; enough to regenerate it bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedInfo {
    /// Root of the prior-draw stream tree; block `b` draws from `prior.child(b)`.
    pub prior: RngStream,
    pub block_size: usize,
}

/// `n` parameter vectors of a common dimension, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawBatch {
    dim: usize,
    coords: Vec<f64>,
    seed_info: Option<SeedInfo>,
}

impl DrawBatch {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("parameter dimension must be at least 1"));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "{} coordinates do not form a nonempty batch of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteDraw { index: pos / dim });
        }
        Ok(Self {
            dim,
            coords,
            seed_info: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            if r.as_ref().len() != dim {
                return Err(invalid(format!("row {i} has length {} (expected {dim})", r.as_ref().len())));
            }
            coords.extend_from_slice(r.as_ref());
        }
        Self::new(dim, coords)
    }

    /// Scalar draws.
    pub fn from_scalars(values: Vec<f64>) -> Result<Self> {
        Self::new(1, values)
    }

    pub(crate) fn from_parts_unchecked(dim: usize, coords: Vec<f64>, seed_info: Option<SeedInfo>) -> Self {
        debug_assert!(dim > 0 && !coords.is_empty() && coords.len().is_multiple_of(dim));
        Self {
            dim,
            coords,
            seed_info,
        }
    }

    pub fn with_seed_info(mut self, info: SeedInfo) -> Self {
        self.seed_info = Some(info);
        self
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn column(&self, coord: usize) -> Vec<f64> {
        assert!(coord < self.dim, "coordinate {coord} out of range for dimension {}", self.dim);
        self.iter().map(|row| row[coord]).collect()
    }

    pub fn seed_info(&self) -> Option<&SeedInfo> {
        self.seed_info.as_ref()
    }

    /// Draws `indices` in order (with repetition) into a new batch.
    pub fn gather(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.get(i));
        }
        Self::from_parts_unchecked(self.dim, coords, None)
    }

    /// Keeps only the first `k` coordinates of every draw.
    pub fn project(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim {
            return Err(invalid(format!("cannot project dimension {} onto {k} coordinates", self.dim)));
        }
        let coords = self.iter().flat_map(|row| row[..k].iter().copied()).collect();
        Ok(Self::from_parts_unchecked(k, coords, None))
    }
}

/// Per-draw log-likelihoods, aligned with a [`DrawBatch`]. Entries are real or `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLikelihoods(Vec<f64>);

impl LogLikelihoods {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("log-likelihood vector is empty"));
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_nan() || **v == f64::INFINITY)
        {
            return Err(Error::InvalidLogLikelihood { index, value });
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Largest entry; `-inf` when no draw has positive likelihood.
    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Adds `c` to every entry. `-inf` stays `-inf`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v + c).collect())
    }
}
