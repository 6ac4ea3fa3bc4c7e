//! Plug-in diagnostics against quadrature and brute-force replication.

use priorpost::diagnostics::{
    asymptotic_variance_hat, asymptotic_variance_parts, d2_hat, high_information_sweep, replication_variance_study,
};
use priorpost::engine::run_sharded;
use priorpost::models::{oracle_prior_integrals, BetaBernoulli, FlatGaussian, GaussianGaussian};
use priorpost::{Model, RngStream};

fn fig1() -> GaussianGaussian {
    GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap()
}

fn mask(draws: &priorpost::DrawBatch, a: f64) -> Vec<bool> {
    draws.iter().map(|t| t[0] <= a).collect()
}

#[test]
fn plug_in_variance_matches_quadrature() {
    let model = fig1();
    let (draws, ll) = run_sharded(&model, 1_000_000, 4, 11).unwrap();
    let hat = asymptotic_variance_hat(&ll, &mask(&draws, 0.5)).unwrap();
    let oracle = oracle_prior_integrals(&model, Some(0.5)).unwrap().asymptotic_variance();
    assert!((hat / oracle - 1.0).abs() < 0.05, "{hat} vs {oracle}");
    let d2 = d2_hat(&ll).unwrap();
    assert!((d2 - 0.3104).abs() < 0.02, "{d2}");
}

#[test]
fn replication_agrees_with_plug_in() {
    let model = fig1();
    let (draws, ll) = run_sharded(&model, 1_000_000, 4, 12).unwrap();
    let hat = asymptotic_variance_hat(&ll, &mask(&draws, 0.5)).unwrap();
    let study = replication_variance_study(&model, 10_000, |t| t[0] <= 0.5, 500, &RngStream::new(12)).unwrap();
    assert!((study.scaled_variance / hat - 1.0).abs() < 0.10, "{} vs {hat}", study.scaled_variance);
    let bound = 2.0 * study.mean_d2_hat().exp();
    assert!(study.scaled_variance <= bound * 1.1);
}

#[test]
fn plug_in_numerator_is_rarely_negative() {
    fn share_nonnegative<M: Model>(model: &M, cut: f64) -> f64 {
        let mut ok = 0;
        for seed in 0..200u64 {
            let (draws, ll) = run_sharded(model, 200, 1, seed).unwrap();
            ok += usize::from(asymptotic_variance_parts(&ll, &mask(&draws, cut)).unwrap().raw >= 0.0);
        }
        ok as f64 / 200.0
    }
    assert!(share_nonnegative(&fig1(), 0.5) >= 0.99);
    assert!(share_nonnegative(&BetaBernoulli::new(2.0, 2.0, 7, 10).unwrap(), 0.6) >= 0.99);
}

#[test]
fn sweep_is_stable_when_n_doubles() {
    let family = |t: f64| GaussianGaussian::new(0.0, 1.0, 1.0, t as u64, 1.0);
    let reps: Vec<(f64, f64)> = (0..20u64)
        .map(|s| {
            let small = high_information_sweep(family, &[100.0], 50_000, &RngStream::new(s)).unwrap();
            let large = high_information_sweep(family, &[100.0], 100_000, &RngStream::new(1000 + s)).unwrap();
            (small[0].result.clone().unwrap().d2_hat, large[0].result.clone().unwrap().d2_hat)
        })
        .collect();
    let small: Vec<f64> = reps.iter().map(|r| r.0).collect();
    let mean = small.iter().sum::<f64>() / small.len() as f64;
    let se = (small.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (small.len() - 1) as f64).sqrt();
    let large_mean = reps.iter().map(|r| r.1).sum::<f64>() / reps.len() as f64;
    assert!((large_mean - mean).abs() < se, "{mean} -> {large_mean}, se {se}");
}

#[test]
fn flat_prior_limit_scales_with_inverse_density() {
    // Halving the prior density at the likelihood peak doubles Π₀(f²)/Π₀(f)².
    let t_grid = [100.0, 10_000.0];
    let ratio_at = |half_width: f64| {
        let family = move |t: f64| FlatGaussian::new(-half_width, half_width, 1.0, t as u64, 1.0);
        let rows = high_information_sweep(family, &t_grid, 1_000_000, &RngStream::new(5)).unwrap();
        let estimate = rows[1].result.clone().unwrap().ratio;
        let oracle = oracle_prior_integrals(&family(t_grid[1]).unwrap(), None).unwrap().second_moment_ratio();
        assert!((estimate / oracle - 1.0).abs() < 0.05, "{estimate} vs {oracle}");
        estimate
    };
    let narrow = ratio_at(5.0);
    let wide = ratio_at(10.0);
    assert!((wide / narrow / 2.0 - 1.0).abs() < 0.20, "{narrow} -> {wide}");
}
