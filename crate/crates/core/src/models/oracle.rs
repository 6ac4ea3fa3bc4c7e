//! Prior expectations of the likelihood by numerical integration.
//!
//! These are the population quantities behind the asymptotic variance of
//! the weighted estimator and the order-2 Rényi divergence. They are only
//! used to check the samplers; nothing on the sampling path calls them.

use super::quadrature::Quadrature;
use crate::error::Result;

/// A scalar model whose prior density and likelihood can be evaluated pointwise.
pub trait OracleModel {
    fn prior_log_density(&self, theta: f64) -> f64;
    fn log_lik(&self, theta: f64) -> f64;
    /// Finite range carrying all but a negligible part of the prior mass.
    fn support(&self) -> (f64, f64);
    /// Points near which the integrands concentrate.
    fn breakpoints(&self) -> Vec<f64>;
}

/// `Π₀(f)`, `Π₀(f²)`, `Π₀(f·1_A)` and `Π₀(f²·1_A)` for a half-line `A = (-inf, a]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorIntegrals {
    pub pf: f64,
    pub pf2: f64,
    pub pfa: f64,
    pub pf2a: f64,
}

impl PriorIntegrals {
    /// Posterior probability of `A`.
    pub fn posterior_prob(&self) -> f64 {
        self.pfa / self.pf
    }

    /// `Π₀(f²) / Π₀(f)²`, equal to `exp D₂(Π₁ ‖ Π₀)`.
    pub fn second_moment_ratio(&self) -> f64 {
        self.pf2 / (self.pf * self.pf)
    }

    pub fn d2(&self) -> f64 {
        self.second_moment_ratio().ln()
    }

    /// Limit of `n · Var(Π̂₁(A))` for the weighted estimator.
    pub fn asymptotic_variance(&self) -> f64 {
        let p = self.posterior_prob();
        (self.pf2 * p * p + self.pf2a * (1.0 - 2.0 * p)) / (self.pf * self.pf)
    }
}

/// Integrates against the prior at relative tolerance `1e-8`. With
/// `half_line = None`, `A` is the whole space.
pub fn oracle_prior_integrals<M: OracleModel + ?Sized>(model: &M, half_line: Option<f64>) -> Result<PriorIntegrals> {
    oracle_prior_integrals_with(model, half_line, &Quadrature::default())
}

pub fn oracle_prior_integrals_with<M: OracleModel + ?Sized>(
    model: &M,
    half_line: Option<f64>,
    quad: &Quadrature,
) -> Result<PriorIntegrals> {
    let (lo, hi) = model.support();
    let hints = model.breakpoints();
    let f1 = |x: f64| (model.prior_log_density(x) + model.log_lik(x)).exp();
    let f2 = |x: f64| (model.prior_log_density(x) + 2.0 * model.log_lik(x)).exp();
    let pf = quad.integrate_with_hints(f1, lo, hi, &hints)?.value;
    let pf2 = quad.integrate_with_hints(f2, lo, hi, &hints)?.value;
    let (pfa, pf2a) = match half_line {
        None => (pf, pf2),
        Some(a) if a <= lo => (0.0, 0.0),
        Some(a) if a >= hi => (pf, pf2),
        Some(a) => (
            quad.integrate_with_hints(f1, lo, a, &hints)?.value,
            quad.integrate_with_hints(f2, lo, a, &hints)?.value,
        ),
    };
    Ok(PriorIntegrals { pf, pf2, pfa, pf2a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{BetaBernoulli, ConstantLikelihood, GaussianGaussian};

    fn normal_pdf(x: f64, sd: f64) -> f64 {
        (-0.5 * (x / sd).powi(2)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
    }

    #[test]
    fn constant_likelihood() {
        let k: f64 = 0.3;
        let m = ConstantLikelihood::new(0.0, 1.0, k.ln()).unwrap();
        let i = oracle_prior_integrals(&m, Some(0.0)).unwrap();
        assert!((i.pf - k).abs() < 1e-9 * k, "{i:?}");
        assert!((i.pf2 - k * k).abs() < 1e-9 * k * k);
        assert!((i.pf2a - 0.5 * k * k).abs() < 1e-9 * k * k);
        assert!(i.d2().abs() < 1e-10);
    }

    #[test]
    fn gaussian_evidence_is_convolution() {
        // x | theta ~ N(theta, 1), theta ~ N(0, 1)  =>  x ~ N(0, 2).
        let m = GaussianGaussian::new(0.0, 1.0, 1.0, 1, 1.0).unwrap();
        let i = oracle_prior_integrals(&m, Some(0.5)).unwrap();
        let exact = normal_pdf(1.0, 2f64.sqrt());
        assert!(((i.pf - exact) / exact).abs() < 1e-9);
        assert!((i.posterior_prob() - 0.5).abs() < 1e-9);
        // closed form of Π₀(f²)/Π₀(f)² for a=1, x=1: 2/√3 · exp(1/6)
        let ratio = 2.0 / 3f64.sqrt() * (1.0f64 / 6.0).exp();
        assert!((i.second_moment_ratio() - ratio).abs() < 1e-8);
    }

    #[test]
    fn beta_evidence_is_beta_function() {
        for (s, t) in [(2u64, 2u64), (3, 7), (0, 5)] {
            let m = BetaBernoulli::new(1.0, 1.0, s, t).unwrap();
            let i = oracle_prior_integrals(&m, None).unwrap();
            let exact = statrs::function::beta::beta((s + 1) as f64, (t - s + 1) as f64);
            assert!(((i.pf - exact) / exact).abs() < 1e-9, "{s}/{t}");
        }
    }

    #[test]
    fn cauchy_schwarz_and_monotone_in_a() {
        let m = GaussianGaussian::new(0.0, 1.0, 1.0, 100, 1.0).unwrap();
        for a in [-1.0, 0.9, 1.0, 1.1, 3.0] {
            let i = oracle_prior_integrals(&m, Some(a)).unwrap();
            assert!(i.pf2 >= i.pf * i.pf);
            assert!(i.pf2 >= i.pf2a);
        }
    }
}
