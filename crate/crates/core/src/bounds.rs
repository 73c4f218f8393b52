//! Closed-form and implicitly defined approximations to the Gaussian Gittins
//! index: the Bayes-UCB quantile index, the noiseless-relaxation (optimistic)
//! index, a tail-bound upper bound and an explore-then-commit lower bound.
//!
//! The upper and lower bounds are for the standardized arm (prior `N(0, 1)`);
//! destandardize with `μ + σ·b`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normal::{self, excess, ln_pdf, pdf, quantile_asymptotic, std_normal_quantile};
use crate::posterior::{variance_after, NoiseModel, PosteriorState};
use crate::roots::bisect_decreasing;

/// Tolerance on λ for every implicit bound.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Below this discount [`upper_bound_index`] returns the optimistic index instead.
pub const UPPER_BOUND_MIN_DISCOUNT: f64 = 0.6;

fn check_discount(gamma: f64) -> Result<f64> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(gamma)
    } else {
        Err(Error::Domain { what: "discount must lie in (0, 1)", value: gamma })
    }
}

/// Largest root of a decreasing `f` above `lo`, doubling the search interval until it straddles.
fn root_above<F: FnMut(f64) -> f64>(mut f: F, lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..64 {
        if f(hi) < 0.0 {
            let b = bisect_decreasing(|x| Ok(f(x)), lo, hi, BOUND_TOLERANCE)?;
            return Ok(b.midpoint());
        }
        hi = lo + 2.0 * (hi - lo);
    }
    Err(Error::Bracket { lo, hi, f_lo: f(lo), f_hi: f(hi) })
}

/// `μ + σ·Φ⁻¹(γ)`.
pub fn quantile_index(state: PosteriorState, discount: f64) -> Result<f64> {
    Ok(state.mean() + state.std_dev() * std_normal_quantile(discount)?)
}

/// Index of an agent who sees θ after the first play: the λ with
/// `(γ/(1−γ))·E[(θ − λ)⁺] = λ − μ` for `θ ~ N(μ, σ²)`.
pub fn optimistic_index(state: PosteriorState, discount: f64) -> Result<f64> {
    let gamma = check_discount(discount)?;
    let (mu, sigma) = (state.mean(), state.std_dev());
    let c = gamma / (1.0 - gamma);
    let f = |lam: f64| c * excess(sigma, lam - mu) - (lam - mu);
    // E[(θ − λ)⁺] ≤ σφ(0) beyond μ, so the root is below μ + cσφ(0).
    root_above(f, mu, mu + sigma * (c * normal::INV_SQRT_2PI + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperBound {
    pub value: f64,
    /// True when the discount is below [`UPPER_BOUND_MIN_DISCOUNT`] and `value`
    /// is the optimistic index.
    pub fallback: bool,
}

/// Standardized upper bound `λ̄` solving `(γ/(1−γ))·φ(λ) = λ`.
///
/// It dominates the optimistic index because `E[(Z − λ)⁺] ≤ φ(λ)` for `λ ≥ 0`.
pub fn upper_bound_index(discount: f64) -> Result<UpperBound> {
    let gamma = check_discount(discount)?;
    if gamma < UPPER_BOUND_MIN_DISCOUNT {
        let value = optimistic_index(PosteriorState::standard(), gamma)?;
        return Ok(UpperBound { value, fallback: true });
    }
    let c = gamma / (1.0 - gamma);
    let hi = 2.0 * quantile_asymptotic(gamma)? + 5.0;
    let value = root_above(|lam| c * pdf(lam) - lam, 0.0, hi)?;
    Ok(UpperBound { value, fallback: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundDiagnostics {
    /// Exploration length `L = max(1, ⌈ratio·log(1/(1−γ))²⌉)`.
    pub exploration_length: u64,
    /// `−log L + L·log γ + 2·log(1 − σ_L²) + log √(2π)`.
    pub h: f64,
    /// Posterior variance `σ_L²` after `L` observations.
    pub residual_variance: f64,
    pub bound: f64,
    /// No λ ≥ 2√(1 − σ_L²) satisfies the tail-bound inequality. `bound` is then
    /// the fair tax of the same explore-then-commit policy computed with the
    /// exact expected excess instead of its lower bound.
    pub degenerate: bool,
}

/// Explore-then-commit lower bound for the standardized arm.
///
/// Exploring for `L` plays and then committing iff `μ_L > λ` earns at least
/// `γᴸ/(1−γ)·E[(μ_L − λ)⁺] − Lλ`, where `μ_L ~ N(0, 1 − σ_L²)`. The bound is
/// the largest λ at which the tail lower bound `(v²/λ³)·φ(λ/√v)` (valid for
/// λ ≥ 2√v, `v = 1 − σ_L²`) still keeps that nonnegative.
pub fn lower_bound_index(discount: f64, noise_to_signal: f64) -> Result<LowerBoundDiagnostics> {
    let gamma = check_discount(discount)?;
    let noise = NoiseModel::new(noise_to_signal)?;
    let log_horizon = -(-gamma).ln_1p();
    let l = (noise_to_signal * log_horizon * log_horizon).ceil().max(1.0) as u64;
    let residual_variance = variance_after(1.0, noise, l);
    let v = 1.0 - residual_variance;
    let sd = v.sqrt();
    let lf = l as f64;
    let h = -lf.ln() + lf * gamma.ln() + 2.0 * v.ln() + (2.0 * std::f64::consts::PI).sqrt().ln();

    let log_gain = lf * gamma.ln() - (-gamma).ln_1p();
    let inequality = |lam: f64| log_gain + (v * v / lam.powi(3)).ln() - (lf * lam).ln() + ln_pdf(lam / sd);
    let floor = 2.0 * sd;
    let (bound, degenerate) = if inequality(floor) >= 0.0 {
        (root_above(inequality, floor, floor + 1.0)?, false)
    } else {
        // The first play after the prior is forced in the retirement game, so explore at least twice.
        let explore = l.max(2);
        let v = 1.0 - variance_after(1.0, noise, explore);
        let gain = gamma.powi(explore as i32) / (1.0 - gamma);
        let fair = |lam: f64| gain * excess(v.sqrt(), lam) - explore as f64 * lam;
        (root_above(fair, 0.0, 1.0)?, true)
    };
    Ok(LowerBoundDiagnostics { exploration_length: l, h, residual_variance, bound, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_index_examples() {
        let s = PosteriorState::standard();
        assert!(quantile_index(s, 0.5).unwrap().abs() < 1e-15);
        assert!((quantile_index(s, 0.975).unwrap() - 1.959_964).abs() < 1e-6);
        let s = PosteriorState::new(2.0, 4.0).unwrap();
        assert!((quantile_index(s, 0.975).unwrap() - 5.919_928).abs() < 2e-6);
        assert!(quantile_index(s, 1.0).is_err());
    }

    #[test]
    fn optimistic_index_examples() {
        // Roots of (γ/(1−γ))·(φ(λ) − λ(1−Φ(λ))) = λ from a separate scalar solve.
        let s = PosteriorState::standard();
        for (gamma, want) in [(0.5, 0.276_030_2), (0.01, 0.004_009_5), (0.9, 0.901_462), (0.99, 1.720_783)] {
            let got = optimistic_index(s, gamma).unwrap();
            assert!((got - want).abs() < 2e-6, "γ {gamma}: {got} vs {want}");
        }
        // Equivariant in (μ, σ).
        let shifted = optimistic_index(PosteriorState::new(-1.0, 9.0).unwrap(), 0.9).unwrap();
        assert!((shifted - (-1.0 + 3.0 * 0.901_462)).abs() < 1e-5);
    }

    #[test]
    fn upper_bound_examples() {
        let u = upper_bound_index(0.99).unwrap();
        assert!(!u.fallback);
        assert!((99.0 * pdf(u.value) - u.value).abs() < 1e-7);
        assert!((u.value - 2.371_73).abs() < 1e-5, "{}", u.value);
        let values: Vec<f64> = [0.9, 0.99, 0.999].iter().map(|&g| upper_bound_index(g).unwrap().value).collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]));
        let low = upper_bound_index(0.5).unwrap();
        assert!(low.fallback);
        assert_eq!(low.value, optimistic_index(PosteriorState::standard(), 0.5).unwrap());
    }

    #[test]
    fn upper_bound_dominates_optimistic() {
        for gamma in [0.6, 0.9, 0.99, 0.999, 0.9999] {
            let u = upper_bound_index(gamma).unwrap().value;
            let o = optimistic_index(PosteriorState::standard(), gamma).unwrap();
            assert!(o <= u, "γ {gamma}: {o} > {u}");
        }
    }

    #[test]
    fn lower_bound_diagnostics() {
        let d = lower_bound_index(0.99, 1.0).unwrap();
        assert_eq!(d.exploration_length, 22);
        assert!((d.residual_variance - 1.0 / 23.0).abs() < 1e-15);
        assert!(d.bound.is_finite() && d.bound > 0.0);
        assert!(lower_bound_index(0.5, 1.0).unwrap().degenerate);
        let d = lower_bound_index(0.999, 1.0).unwrap();
        assert!(d.bound <= upper_bound_index(0.999).unwrap().value);
    }

    #[test]
    fn lower_bound_tail_branch_when_patient_enough() {
        let d = lower_bound_index(1.0 - 1e-12, 1.0).unwrap();
        if !d.degenerate {
            assert!(d.bound >= 2.0 * (1.0 - d.residual_variance).sqrt());
        }
        assert!(d.bound.is_finite());
    }
}
