use proptest::prelude::*;

use priorpost::diagnostics::{
    asymptotic_variance_parts, d2_hat, ess, ks_distance, variance_bound, DiagnosticsReport,
};
use priorpost::engine::{reduce_sum, reduce_sum_serial, run_sharded, ShardPlan};
use priorpost::io::{read_csv, read_json, write_csv, write_json, Sample};
use priorpost::models::{normal_cdf, GaussianGaussian};
use priorpost::{
    amplify, copy_counts, multinomial_indices, normalize_weights, scaled_likelihoods, DrawBatch, LogLikelihoods,
    RngStream, UnweightedPosterior, WeightedPosterior,
};

/// Log-likelihoods with at least one finite entry; some may be `-inf`.
fn log_likelihoods() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![9 => -50.0..10.0f64, 1 => Just(f64::NEG_INFINITY)], 1..200)
        .prop_filter("needs a finite entry", |v| v.iter().any(|x| x.is_finite()))
}

fn ll(v: &[f64]) -> LogLikelihoods {
    LogLikelihoods::new(v.to_vec()).unwrap()
}

proptest! {
    #[test]
    fn weights_are_a_distribution(v in log_likelihoods()) {
        let w = normalize_weights(&ll(&v)).unwrap().weights;
        prop_assert!((reduce_sum(&w) - 1.0).abs() < 1e-12);
        for (wi, li) in w.iter().zip(&v) {
            prop_assert!(*wi >= 0.0 && *wi <= 1.0);
            prop_assert_eq!(*wi == 0.0 && *li == f64::NEG_INFINITY, *li == f64::NEG_INFINITY);
        }
    }

    #[test]
    fn weights_ignore_a_constant_shift(v in log_likelihoods(), k in -300i32..300, c in -300.0..300.0f64) {
        let base = normalize_weights(&ll(&v)).unwrap().weights;
        // Integer data shifted by an integer stays exact, so the weights agree bit for bit.
        let ints: Vec<f64> = v.iter().map(|x| x.round()).collect();
        let a = normalize_weights(&ll(&ints)).unwrap().weights;
        let b = normalize_weights(&ll(&ints.iter().map(|x| x + k as f64).collect::<Vec<_>>())).unwrap().weights;
        prop_assert_eq!(a, b);
        let shifted = normalize_weights(&ll(&v.iter().map(|x| x + c).collect::<Vec<_>>())).unwrap().weights;
        for (x, y) in base.iter().zip(&shifted) {
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn copy_counts_floor_and_order(v in log_likelihoods(), c in 1.0..1e4f64) {
        let s = scaled_likelihoods(&ll(&v)).unwrap();
        let counts = copy_counts(&s, c).unwrap();
        let top = c.ceil() as u64;
        for (k, sv) in counts.iter().zip(&s) {
            prop_assert!(*k <= top);
            prop_assert_eq!(*k == 0, *sv == 0.0);
        }
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
        prop_assert!(order.windows(2).all(|p| counts[p[0]] <= counts[p[1]]));
    }

    #[test]
    fn amplified_bag_keeps_every_finite_draw(v in log_likelihoods(), c in 1.0..100.0f64) {
        let draws = DrawBatch::from_scalars((0..v.len()).map(|i| i as f64).collect()).unwrap();
        let bag = amplify(&draws, &ll(&v), c, u64::MAX).unwrap();
        let counts = bag.copy_counts(v.len()).unwrap();
        for (k, l) in counts.iter().zip(&v) {
            prop_assert_eq!(*k >= 1, l.is_finite());
        }
    }

    #[test]
    fn multinomial_indices_are_sorted_and_live(v in log_likelihoods(), m in 1usize..500, seed: u64) {
        let w = normalize_weights(&ll(&v)).unwrap().weights;
        let idx = multinomial_indices(&w, m, &RngStream::new(seed)).unwrap();
        prop_assert_eq!(idx.len(), m);
        prop_assert!(idx.windows(2).all(|p| p[0] <= p[1]));
        prop_assert!(idx.iter().all(|&i| w[i] > 0.0));
    }

    #[test]
    fn reduce_sum_shape_is_fixed(v in prop::collection::vec(-1e6..1e6f64, 0..5000)) {
        prop_assert_eq!(reduce_sum(&v).to_bits(), reduce_sum_serial(&v).to_bits());
    }

    #[test]
    fn d2_matches_ess_and_is_nonnegative(v in log_likelihoods()) {
        let l = ll(&v);
        let d2 = d2_hat(&l).unwrap();
        let e = ess(&normalize_weights(&l).unwrap().weights);
        prop_assert!(d2 >= 0.0);
        prop_assert!((d2 - ((v.len() as f64).ln() - e.ln()).max(0.0)).abs() < 1e-9);
        prop_assert!(e <= v.len() as f64 * (1.0 + 1e-12));
    }

    #[test]
    fn variance_estimate_respects_bound(v in log_likelihoods(), mask in prop::collection::vec(any::<bool>(), 200)) {
        let l = ll(&v);
        let in_a = &mask[..v.len()];
        let est = asymptotic_variance_parts(&l, in_a).unwrap();
        let bound = variance_bound(d2_hat(&l).unwrap());
        prop_assert!(est.raw >= -1e-9 * bound);
        prop_assert!(est.value <= bound * (1.0 + 1e-9));
    }

    #[test]
    fn report_is_consistent(v in log_likelihoods()) {
        let r = DiagnosticsReport::from_log_likelihoods(&ll(&v), &[]).unwrap();
        prop_assert!((r.variance_bound - 2.0 * r.d2_hat.exp()).abs() <= 1e-12 * r.variance_bound);
        prop_assert!(r.ess >= 1.0 - 1e-12 && r.ess <= r.n as f64);
    }

    #[test]
    fn ks_is_a_probability_and_reparameterisation_free(
        xs in prop::collection::vec(-5.0..5.0f64, 1..100),
        raw_w in prop::collection::vec(0.01..1.0f64, 100),
    ) {
        let w = raw_w[..xs.len()].to_vec();
        let a = WeightedPosterior::new(DrawBatch::from_scalars(xs.clone()).unwrap(), w.clone()).unwrap();
        let mapped: Vec<f64> = xs.iter().map(|x| x.powi(3) + x).collect();
        let b = WeightedPosterior::new(DrawBatch::from_scalars(mapped.clone()).unwrap(), w).unwrap();
        let da = ks_distance(&a, normal_cdf, 0);
        // Reference CDF at x^3 + x, pulled back exactly to the draw it came from.
        let db = ks_distance(&b, |y| {
            let i = mapped.iter().position(|m| *m == y).unwrap();
            normal_cdf(xs[i])
        }, 0);
        prop_assert!((0.0..=1.0).contains(&da));
        prop_assert!((da - db).abs() < 1e-12);
    }

    #[test]
    fn files_round_trip(
        dim in 1usize..4,
        rows in prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 3), 1..30),
        weighted: bool,
    ) {
        let coords: Vec<f64> = rows.iter().flat_map(|r| r[..dim].to_vec()).collect();
        let draws = DrawBatch::new(dim, coords).unwrap();
        let sample = if weighted {
            let w = (0..draws.len()).map(|i| 1.0 / (i + 1) as f64).collect();
            Sample::Weighted(WeightedPosterior::new(draws, w).unwrap())
        } else {
            Sample::Unweighted(UnweightedPosterior::new(draws))
        };
        let mut csv = Vec::new();
        write_csv(&mut csv, &sample).unwrap();
        let back = read_csv(csv.as_slice()).unwrap();
        prop_assert_eq!(back.draws().coords(), sample.draws().coords());
        prop_assert_eq!(back.weights(), sample.weights());
        let mut json = Vec::new();
        write_json(&mut json, &sample).unwrap();
        let back = read_json(json.as_slice()).unwrap();
        prop_assert_eq!(back.draws().coords(), sample.draws().coords());
        prop_assert_eq!(back.weights(), sample.weights());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shard_count_never_changes_output(n in 1usize..5000, shards in 1usize..80, seed: u64) {
        let model = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
        let (d1, l1) = run_sharded(&model, n, 1, seed).unwrap();
        let (dk, lk) = run_sharded(&model, n, shards, seed).unwrap();
        prop_assert_eq!(d1.coords(), dk.coords());
        prop_assert_eq!(l1.as_slice(), lk.as_slice());
    }

    #[test]
    fn shard_plan_covers_range(n in 1usize..100_000, k in 1usize..200) {
        let plan = ShardPlan::new(n, k).unwrap();
        let mut next = 0;
        for s in &plan.shards {
            prop_assert_eq!(s.offset, next);
            next += s.len;
        }
        prop_assert_eq!(next, n);
    }
}
