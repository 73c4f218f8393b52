//! Discounted k-armed Gaussian bandit simulator.
//!
//! Randomness is derived from `(seed, replication, purpose)`: a ChaCha8 generator
//! seeded with `seed` is moved to stream `replication·2¹⁶ + purpose`. Purpose 0
//! draws the true means (one normal per arm, in arm order, drawn even when the
//! mean is fixed). Purpose `1 + i` holds arm `i`'s reward noise, consumed one
//! draw per pull, so the n-th pull of an arm sees the same noise under every
//! policy. Replications run on the current rayon pool and are merged in order,
//! so results do not depend on the number of workers.

mod policy;
mod report;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::posterior::{variance_after, NoiseModel, PosteriorState};
use crate::solver::{build_table, IndexTable, SolverConfig};

pub use policy::{policy_choose, Policy};
pub use report::{trace_csv, Summary};

use policy::Scorer;

/// At most this many arms (the reward streams share a 16-bit purpose field).
pub const MAX_ARMS: usize = (1 << 16) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArmSpec {
    pub prior_mean: f64,
    pub prior_variance: f64,
    pub noise: NoiseModel,
    /// Drawn from the prior when absent.
    pub true_mean: Option<f64>,
}

impl ArmSpec {
    pub fn new(prior_mean: f64, prior_variance: f64, noise_variance: f64) -> Result<Self> {
        PosteriorState::new(prior_mean, prior_variance)?;
        Ok(Self { prior_mean, prior_variance, noise: NoiseModel::new(noise_variance)?, true_mean: None })
    }

    pub fn with_true_mean(self, theta: f64) -> Self {
        Self { true_mean: Some(theta), ..self }
    }

    fn prior(&self) -> PosteriorState {
        PosteriorState::new(self.prior_mean, self.prior_variance).expect("validated ArmSpec")
    }

    /// `σ_W²/σ₀²`.
    pub fn noise_to_signal(&self) -> f64 {
        self.noise.variance() / self.prior_variance
    }
}

/// Belief about one arm during a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmBelief {
    pub posterior: PosteriorState,
    pub noise: NoiseModel,
    pub pulls: u64,
    prior_variance: f64,
}

impl ArmBelief {
    pub fn new(posterior: PosteriorState, noise: NoiseModel) -> Self {
        Self { posterior, noise, pulls: 0, prior_variance: posterior.variance() }
    }

    /// Conjugate update. The variance is recomputed from the pull count so it
    /// equals `variance_after(prior, noise, pulls)` exactly.
    pub fn observe(&mut self, reward: f64) {
        self.pulls += 1;
        let variance = variance_after(self.prior_variance, self.noise, self.pulls);
        let mean = variance * (self.posterior.mean() / self.posterior.variance() + reward * self.noise.precision());
        self.posterior = PosteriorState::new(mean, variance).expect("finite conjugate update");
    }
}

/// `⌈log(10⁻⁶)/log γ⌉`: the horizon after which less than 10⁻⁶ of the discount weight remains.
pub fn default_horizon(discount: f64) -> u64 {
    ((1e-6f64).ln() / discount.ln()).ceil().max(1.0) as u64
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationConfig {
    pub arms: Vec<ArmSpec>,
    pub discount: f64,
    pub horizon: u64,
    pub replications: u64,
    pub seed: u64,
    pub policy: Policy,
    /// Keep the per-step trace (memory grows with replications × horizon).
    pub record_trace: bool,
}

impl SimulationConfig {
    /// 100 replications, seed 0, the default horizon and no trace.
    pub fn new(arms: Vec<ArmSpec>, discount: f64, policy: Policy) -> Self {
        Self {
            arms,
            discount,
            horizon: default_horizon(discount),
            replications: 100,
            seed: 0,
            policy,
            record_trace: false,
        }
    }

    /// `n` arms with prior `N(0, prior_variance)` and the given noise.
    pub fn symmetric(n: usize, prior_variance: f64, noise_variance: f64, discount: f64, policy: Policy) -> Result<Self> {
        let arm = ArmSpec::new(0.0, prior_variance, noise_variance)?;
        Ok(Self::new(vec![arm; n], discount, policy))
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms.is_empty() || self.arms.len() > MAX_ARMS {
            return Err(Error::Config(format!("need between 1 and {MAX_ARMS} arms, got {}", self.arms.len())));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(Error::Domain { what: "discount must lie in (0, 1)", value: self.discount });
        }
        if self.horizon == 0 || self.replications == 0 {
            return Err(Error::Config("horizon and replications must be at least 1".into()));
        }
        for arm in &self.arms {
            PosteriorState::new(arm.prior_mean, arm.prior_variance)?;
            if let Some(theta) = arm.true_mean {
                crate::error::ensure_finite("true mean must be finite", theta)?;
            }
        }
        Ok(())
    }

    /// `γᴴ/(1−γ)`: discount weight beyond the simulated horizon.
    pub fn residual_mass(&self) -> f64 {
        self.discount.powf(self.horizon as f64) / (1.0 - self.discount)
    }
}

/// Per-step trace of one replication, stored column-wise.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub arms: Vec<usize>,
    pub rewards: Vec<f64>,
    pub discounted_cum_rewards: Vec<f64>,
    /// Row-major `steps × arms` index values seen by the policy before each choice.
    pub indices: Vec<f64>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub replication: u64,
    pub true_means: Vec<f64>,
    /// `Σ γᵗ rₜ`, accumulated with a running discount factor.
    pub discounted_reward: f64,
    /// `Σ γᵗ (max θ − θ_{aₜ})`.
    pub discounted_regret: f64,
    pub pulls: Vec<u64>,
    pub final_beliefs: Vec<ArmBelief>,
    pub trace: Option<Trace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub records: Vec<ReplicationRecord>,
    /// Discount weight not simulated, `γᴴ/(1−γ)`.
    pub residual_mass: f64,
}

fn stream(seed: u64, replication: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((replication << 16) | purpose);
    rng
}

struct Replication {
    record: ReplicationRecord,
    agreements: u64,
}

fn replicate(config: &SimulationConfig, scorer: &Scorer, shadow: Option<&Scorer>, replication: u64) -> Result<Replication> {
    let k = config.arms.len();
    let mut means_rng = stream(config.seed, replication, 0);
    let true_means: Vec<f64> = config
        .arms
        .iter()
        .map(|arm| {
            let z: f64 = StandardNormal.sample(&mut means_rng);
            arm.true_mean.unwrap_or(arm.prior_mean + arm.prior_variance.sqrt() * z)
        })
        .collect();
    let best = true_means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut reward_rngs: Vec<ChaCha8Rng> = (0..k as u64).map(|i| stream(config.seed, replication, 1 + i)).collect();
    let mut beliefs: Vec<ArmBelief> = config.arms.iter().map(|a| ArmBelief::new(a.prior(), a.noise)).collect();

    let mut trace = config.record_trace.then(|| Trace {
        arms: Vec::with_capacity(config.horizon as usize),
        rewards: Vec::with_capacity(config.horizon as usize),
        discounted_cum_rewards: Vec::with_capacity(config.horizon as usize),
        indices: Vec::with_capacity(config.horizon as usize * k),
    });
    let mut indices = vec![0.0; k];
    let mut shadow_indices = vec![0.0; k];
    let mut weight = 1.0;
    let mut reward_total = 0.0;
    let mut regret_total = 0.0;
    let mut agreements = 0;

    for _ in 0..config.horizon {
        let arm = scorer.choose_into(&beliefs, &mut indices)?;
        if let Some(other) = shadow {
            if other.choose_into(&beliefs, &mut shadow_indices)? == arm {
                agreements += 1;
            }
        }
        let z: f64 = StandardNormal.sample(&mut reward_rngs[arm]);
        let reward = true_means[arm] + config.arms[arm].noise.variance().sqrt() * z;
        reward_total += weight * reward;
        regret_total += weight * (best - true_means[arm]);
        weight *= config.discount;
        beliefs[arm].observe(reward);
        if let Some(trace) = trace.as_mut() {
            trace.arms.push(arm);
            trace.rewards.push(reward);
            trace.discounted_cum_rewards.push(reward_total);
            trace.indices.extend_from_slice(&indices);
        }
    }

    Ok(Replication {
        record: ReplicationRecord {
            replication,
            true_means,
            discounted_reward: reward_total,
            discounted_regret: regret_total,
            pulls: beliefs.iter().map(|b| b.pulls).collect(),
            final_beliefs: beliefs,
            trace,
        },
        agreements,
    })
}

fn run_all(config: &SimulationConfig, policy: &Policy, shadow: Option<&Policy>) -> Result<Vec<Replication>> {
    config.validate()?;
    let scorer = Scorer::new(policy, config.discount, config.horizon)?;
    let shadow = shadow.map(|p| Scorer::new(p, config.discount, config.horizon)).transpose()?;
    (0..config.replications)
        .into_par_iter()
        .map(|r| replicate(config, &scorer, shadow.as_ref(), r))
        .collect()
}

/// Runs every replication of `config`.
pub fn run(config: &SimulationConfig) -> Result<SimulationOutput> {
    let records = run_all(config, &config.policy, None)?.into_iter().map(|r| r.record).collect();
    Ok(SimulationOutput { records, residual_mass: config.residual_mass() })
}

/// Fraction of steps at which `policy_b` would choose the arm `policy_a` plays,
/// both scored on `policy_a`'s belief trajectory. `config.policy` is not used.
pub fn agreement_rate(config: &SimulationConfig, policy_a: &Policy, policy_b: &Policy) -> Result<f64> {
    let reps = run_all(&SimulationConfig { record_trace: false, ..config.clone() }, policy_a, Some(policy_b))?;
    let agreed: u64 = reps.iter().map(|r| r.agreements).sum();
    Ok(agreed as f64 / (config.replications * config.horizon) as f64)
}

/// Log-spaced noise-to-signal ratios covering every belief the arms can reach
/// within `horizon` pulls: `[min σ_W²/σ₀², max σ_W²/σ₀² + horizon]`.
pub fn table_ratios(arms: &[ArmSpec], horizon: u64, points_per_decade: f64) -> Result<Vec<f64>> {
    if arms.is_empty() {
        return Err(Error::Config("need at least one arm".into()));
    }
    if !(points_per_decade > 0.0 && points_per_decade.is_finite()) {
        return Err(Error::Config(format!("points_per_decade must be positive, got {points_per_decade}")));
    }
    let lo = arms.iter().map(ArmSpec::noise_to_signal).fold(f64::INFINITY, f64::min);
    let hi = arms.iter().map(ArmSpec::noise_to_signal).fold(0.0, f64::max) + horizon as f64;
    let n = (((hi / lo).log10() * points_per_decade).ceil() as usize + 1).max(2);
    let (a, b) = (lo.ln(), hi.ln());
    let mut ratios: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    ratios[0] = lo;
    ratios[n - 1] = hi;
    Ok(ratios)
}

/// Index table for a Gittins policy on these arms.
pub fn gittins_table_for(
    arms: &[ArmSpec],
    discount: f64,
    horizon: u64,
    points_per_decade: f64,
    solver: &SolverConfig,
) -> Result<IndexTable> {
    build_table(discount, &table_ratios(arms, horizon, points_per_decade)?, solver)
}
