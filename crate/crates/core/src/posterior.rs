//! Conjugate Gaussian beliefs about an arm's mean reward.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Posterior `N(mean, variance)` over an arm's mean reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorState {
    mean: f64,
    variance: f64,
}

impl PosteriorState {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        ensure_finite("posterior mean must be finite", mean)?;
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::Domain { what: "posterior variance must be positive", value: variance });
        }
        Ok(Self { mean, variance })
    }

    /// The standardized prior `N(0, 1)`.
    pub fn standard() -> Self {
        Self { mean: 0.0, variance: 1.0 }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Observation noise `R | θ ~ N(θ, noise_variance)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    noise_variance: f64,
}

impl NoiseModel {
    pub fn new(noise_variance: f64) -> Result<Self> {
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(Error::Domain { what: "noise variance must be positive", value: noise_variance });
        }
        Ok(Self { noise_variance })
    }

    pub fn variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn precision(&self) -> f64 {
        1.0 / self.noise_variance
    }
}

/// A Gaussian law `N(mean, variance)` with `variance ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLaw {
    pub mean: f64,
    pub variance: f64,
}

/// One conjugate update after observing `reward`.
pub fn update(state: PosteriorState, noise: NoiseModel, reward: f64) -> Result<PosteriorState> {
    ensure_finite("reward must be finite", reward)?;
    let prior_precision = 1.0 / state.variance;
    let precision = prior_precision + noise.precision();
    let mean = (prior_precision * state.mean + noise.precision() * reward) / precision;
    Ok(PosteriorState { mean, variance: 1.0 / precision })
}

/// Posterior variance after `t` observations, `(1/σ₀² + t/σ_W²)⁻¹`.
pub fn variance_after(prior_variance: f64, noise: NoiseModel, t: u64) -> f64 {
    1.0 / (1.0 / prior_variance + t as f64 * noise.precision())
}

/// Predictive law of the posterior mean one observation ahead.
pub fn next_mean_distribution(state: PosteriorState, noise: NoiseModel) -> GaussianLaw {
    mean_after_distribution(state, noise, 1)
}

/// Predictive law of the posterior mean after `observations` more rewards:
/// `N(μ, σ² − σ_L²)` by the law of total variance.
pub fn mean_after_distribution(state: PosteriorState, noise: NoiseModel, observations: u64) -> GaussianLaw {
    let residual = variance_after(state.variance, noise, observations);
    GaussianLaw { mean: state.mean, variance: (state.variance - residual).max(0.0) }
}

/// Checked form of [`mean_after_distribution`] that insists on `L ≥ 1`.
pub fn mean_after_l_distribution(state: PosteriorState, noise: NoiseModel, l: u64) -> Result<GaussianLaw> {
    if l == 0 {
        return Err(Error::Domain { what: "number of observations must be at least 1", value: 0.0 });
    }
    Ok(mean_after_distribution(state, noise, l))
}
