//! Deterministic data-parallel execution.
//!
//! Prior draws are generated in fixed-size blocks; block `b` always reads
//! from the sub-stream `prior.child(b)`. Shards are contiguous runs of whole
//! blocks, so the bytes produced do not depend on how many shards there are
//! or which worker ran which shard. Sums go through [`reduce_sum`], a
//! pairwise tree whose shape depends only on the input length.

use std::panic::{catch_unwind, AssertUnwindSafe};

use crate::batch::{DrawBatch, LogLikelihoods, SeedInfo};
use crate::error::{invalid, Error, Result};
use crate::models::Model;
use crate::rng::{RngStream, PRIOR};

/// Draws per RNG block.
pub const BLOCK_SIZE: usize = 1024;

/// Environment variable capping the number of worker threads.
pub const MAX_WORKERS_ENV: &str = "PRIORPOST_MAX_WORKERS";

const PAIRWISE_LEAF: usize = 32;
#[cfg(feature = "parallel")]
const PARALLEL_SUM_MIN: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shard {
    pub id: usize,
    /// Index of the first draw.
    pub offset: usize,
    pub len: usize,
    /// Index of the first RNG block; the shard covers whole blocks.
    pub first_block: usize,
}

/// Partition of `n_total` draws into contiguous shards of whole RNG blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardPlan {
    pub n_total: usize,
    pub block_size: usize,
    pub shards: Vec<Shard>,
}

impl ShardPlan {
    pub fn new(n_total: usize, shard_count: usize) -> Result<Self> {
        Self::with_block_size(n_total, shard_count, BLOCK_SIZE)
    }

    /// More shards than blocks degenerates to one shard per block.
    pub fn with_block_size(n_total: usize, shard_count: usize, block_size: usize) -> Result<Self> {
        if n_total == 0 {
            return Err(invalid("need at least one draw"));
        }
        if shard_count == 0 {
            return Err(invalid("need at least one shard"));
        }
        if block_size == 0 {
            return Err(invalid("block size must be positive"));
        }
        let blocks = n_total.div_ceil(block_size);
        let working = shard_count.min(blocks);
        let shards = (0..working)
            .map(|id| {
                let first_block = id * blocks / working;
                let end_block = (id + 1) * blocks / working;
                let offset = first_block * block_size;
                let end = (end_block * block_size).min(n_total);
                Shard {
                    id,
                    offset,
                    len: end - offset,
                    first_block,
                }
            })
            .collect();
        Ok(Self {
            n_total,
            block_size,
            shards,
        })
    }

    /// Sub-stream for block `b`: a function of the seed and the draw range only.
    pub fn block_stream(prior: &RngStream, block: usize) -> RngStream {
        prior.child(block as u64)
    }
}

/// Worker count honoured by the pool: `PRIORPOST_MAX_WORKERS` if set, else all cores.
pub fn worker_cap() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    std::env::var(MAX_WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(available)
}

/// Shard count used when the caller does not choose one.
pub fn default_shards() -> usize {
    worker_cap()
}

#[cfg(feature = "parallel")]
fn pool() -> &'static rayon::ThreadPool {
    use std::sync::OnceLock;
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(worker_cap())
            .thread_name(|i| format!("priorpost-worker-{i}"))
            .build()
            .expect("failed to start worker pool")
    })
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic payload".to_string()
    }
}

/// Runs `task(0..count)` on the worker pool and returns results in index order.
/// A panicking task becomes [`Error::WorkerPanic`] carrying its index.
pub(crate) fn run_indexed<T, F>(count: usize, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let guarded = |i: usize| match catch_unwind(AssertUnwindSafe(|| task(i))) {
        Ok(r) => r,
        Err(payload) => Err(Error::WorkerPanic {
            shard: i,
            message: panic_message(payload),
        }),
    };
    #[cfg(feature = "parallel")]
    {
        if count > 1 {
            use rayon::prelude::*;
            let results: Vec<Result<T>> = pool().install(|| (0..count).into_par_iter().map(guarded).collect());
            // first failure in index order, independent of scheduling
            return results.into_iter().collect();
        }
    }
    (0..count).map(guarded).collect()
}

struct ShardOutput {
    coords: Vec<f64>,
    loglik: Vec<f64>,
}

fn run_shard(
    model: &dyn Model,
    shard: &Shard,
    plan: &ShardPlan,
    prior: &RngStream,
    evaluate: bool,
) -> Result<ShardOutput> {
    let dim = model.dim();
    let mut coords = vec![0.0; shard.len * dim];
    let mut done = 0;
    let mut block = shard.first_block;
    while done < shard.len {
        let take = plan.block_size.min(shard.len - done);
        let mut rng = ShardPlan::block_stream(prior, block).rng();
        for row in coords[done * dim..(done + take) * dim].chunks_exact_mut(dim) {
            model.sample_prior(&mut rng, row);
        }
        done += take;
        block += 1;
    }
    if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteDraw {
            index: shard.offset + pos / dim,
        });
    }
    let mut loglik = Vec::new();
    if evaluate {
        loglik.reserve_exact(shard.len);
        for (i, row) in coords.chunks_exact(dim).enumerate() {
            let value = model.log_likelihood(row);
            if value.is_nan() || value == f64::INFINITY {
                return Err(Error::InvalidLogLikelihood {
                    index: shard.offset + i,
                    value,
                });
            }
            loglik.push(value);
        }
    }
    Ok(ShardOutput { coords, loglik })
}

fn run_plan(model: &dyn Model, n: usize, shards: usize, root: &RngStream, evaluate: bool) -> Result<(DrawBatch, Vec<f64>)> {
    if model.dim() == 0 {
        return Err(invalid("model dimension must be at least 1"));
    }
    let plan = ShardPlan::new(n, shards)?;
    let prior = root.child(PRIOR);
    let outputs = run_indexed(plan.shards.len(), |s| run_shard(model, &plan.shards[s], &plan, &prior, evaluate))?;
    let mut coords = Vec::with_capacity(n * model.dim());
    let mut loglik = Vec::with_capacity(if evaluate { n } else { 0 });
    for out in outputs {
        coords.extend_from_slice(&out.coords);
        loglik.extend_from_slice(&out.loglik);
    }
    let info = SeedInfo {
        prior,
        block_size: plan.block_size,
    };
    Ok((DrawBatch::from_parts_unchecked(model.dim(), coords, Some(info)), loglik))
}

/// Draws `n` prior samples under `root` (prior stream `root.child(PRIOR)`) and
/// evaluates their log-likelihoods, split over `shards` workers.
pub fn run_sharded_stream(
    model: &dyn Model,
    n: usize,
    shards: usize,
    root: &RngStream,
) -> Result<(DrawBatch, LogLikelihoods)> {
    let (batch, loglik) = run_plan(model, n, shards, root, true)?;
    Ok((batch, LogLikelihoods::new(loglik)?))
}

/// [`run_sharded_stream`] rooted at `RngStream::new(seed)`. The output is
/// bit-identical for every `shards >= 1`.
pub fn run_sharded(model: &dyn Model, n: usize, shards: usize, seed: u64) -> Result<(DrawBatch, LogLikelihoods)> {
    run_sharded_stream(model, n, shards, &RngStream::new(seed))
}

/// Prior draws only.
pub fn draw_sharded(model: &dyn Model, n: usize, shards: usize, root: &RngStream) -> Result<DrawBatch> {
    run_plan(model, n, shards, root, false).map(|(b, _)| b)
}

/// Re-creates the first `n` draws of a batch from its [`SeedInfo`].
pub fn regenerate(model: &dyn Model, info: &SeedInfo, n: usize) -> Result<DrawBatch> {
    let plan = ShardPlan::with_block_size(n, 1, info.block_size)?;
    let out = run_shard(model, &plan.shards[0], &plan, &info.prior, false)?;
    Ok(DrawBatch::from_parts_unchecked(model.dim(), out.coords, Some(*info)))
}

fn pairwise(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_LEAF {
        values.iter().fold(0.0, |acc, &x| acc + x)
    } else {
        let mid = values.len() / 2;
        pairwise(&values[..mid]) + pairwise(&values[mid..])
    }
}

#[cfg(feature = "parallel")]
fn pairwise_parallel(values: &[f64]) -> f64 {
    if values.len() < PARALLEL_SUM_MIN {
        pairwise(values)
    } else {
        let mid = values.len() / 2;
        let (a, b) = rayon::join(|| pairwise_parallel(&values[..mid]), || pairwise_parallel(&values[mid..]));
        a + b
    }
}

/// Pairwise sum over index order. The tree splits at `len / 2` down to
/// leaves of at most 32 values summed left to right, so the result depends
/// only on the values and their order, whether or not halves run in parallel.
pub fn reduce_sum(values: &[f64]) -> f64 {
    #[cfg(feature = "parallel")]
    {
        if values.len() >= PARALLEL_SUM_MIN {
            return pool().install(|| pairwise_parallel(values));
        }
    }
    pairwise(values)
}

/// Single-threaded [`reduce_sum`]; same bits.
pub fn reduce_sum_serial(values: &[f64]) -> f64 {
    pairwise(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::GaussianGaussian;

    fn neumaier(values: &[f64]) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &v in values {
            let t = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }

    #[test]
    fn plan_covers_draws_in_whole_blocks() {
        for (n, k) in [(1, 1), (10, 3), (5000, 7), (5000, 64), (1024 * 9, 4)] {
            let plan = ShardPlan::new(n, k).unwrap();
            assert_eq!(plan.shards.iter().map(|s| s.len).sum::<usize>(), n);
            let mut next = 0;
            for s in &plan.shards {
                assert_eq!(s.offset, next);
                assert_eq!(s.offset, s.first_block * BLOCK_SIZE);
                assert!(s.len > 0);
                next += s.len;
            }
        }
        assert_eq!(ShardPlan::new(10, 64).unwrap().shards.len(), 1);
        assert!(ShardPlan::new(0, 1).is_err());
        assert!(ShardPlan::new(1, 0).is_err());
    }

    #[test]
    fn reduce_sum_small_cases() {
        assert_eq!(reduce_sum(&[1.0, 2.0, 3.0, 4.0]), 10.0);
        assert_eq!(reduce_sum(&[]), 0.0);
    }

    #[test]
    fn reduce_sum_matches_compensated_reference() {
        let v = vec![0.1; 1_000_000];
        let reference = neumaier(&v);
        let got = reduce_sum(&v);
        assert!(((got - reference) / reference).abs() < 1e-9, "{got} vs {reference}");
    }

    #[test]
    fn reduce_sum_parallel_equals_serial() {
        let v: Vec<f64> = (0..300_001).map(|i| ((i as f64) * 0.618).sin() * 1e3).collect();
        assert_eq!(reduce_sum(&v).to_bits(), reduce_sum_serial(&v).to_bits());
    }

    #[test]
    fn shard_count_does_not_change_output() {
        let model = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
        let (b1, l1) = run_sharded(&model, 10_000, 1, 11).unwrap();
        for shards in [2, 8, 64] {
            let (b, l) = run_sharded(&model, 10_000, shards, 11).unwrap();
            assert_eq!(b.coords(), b1.coords());
            assert_eq!(l.as_slice(), l1.as_slice());
        }
    }

    #[test]
    fn regenerate_from_seed_info() {
        let model = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
        let (batch, _) = run_sharded(&model, 3000, 3, 5).unwrap();
        let again = regenerate(&model, batch.seed_info().unwrap(), 3000).unwrap();
        assert_eq!(again.coords(), batch.coords());
    }

    struct Exploding;
    impl Model for Exploding {
        fn dim(&self) -> usize {
            1
        }
        fn sample_prior(&self, rng: &mut crate::rng::StreamRng, out: &mut [f64]) {
            use rand::Rng;
            out[0] = rng.random();
        }
        fn log_likelihood(&self, theta: &[f64]) -> f64 {
            if theta[0] > 0.999 {
                panic!("boom");
            }
            0.0
        }
    }

    #[test]
    fn worker_panic_names_shard() {
        let err = run_sharded(&Exploding, 20_000, 4, 1).unwrap_err();
        match err {
            Error::WorkerPanic { shard, message } => {
                assert!(shard < 4);
                assert_eq!(message, "boom");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    struct NanModel;
    impl Model for NanModel {
        fn dim(&self) -> usize {
            1
        }
        fn sample_prior(&self, _rng: &mut crate::rng::StreamRng, out: &mut [f64]) {
            out[0] = 1.0;
        }
        fn log_likelihood(&self, _theta: &[f64]) -> f64 {
            f64::NAN
        }
    }

    #[test]
    fn nan_loglik_names_first_index() {
        assert!(matches!(
            run_sharded(&NanModel, 5000, 3, 1),
            Err(Error::InvalidLogLikelihood { index: 0, .. })
        ));
    }
}
