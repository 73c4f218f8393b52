use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::ArmBelief;
use crate::bounds::optimistic_index;
use crate::error::{Error, Result};
use crate::normal::quantile;
use crate::posterior::PosteriorState;
use crate::solver::{IndexTable, DEGENERATE_VARIANCE};

/// Index policies. Each plays the arm with the largest index, lowest id on ties.
#[derive(Debug, Clone)]
pub enum Policy {
    /// `μ + σ·λ_γ(0, 1, σ_W²/σ²)` read from a precomputed table.
    Gittins(Arc<IndexTable>),
    /// Bayes-UCB with quantile level `q = γ`.
    BayesUcbDiscount,
    /// Bayes-UCB with `q = 1 − 1/T`, `T` the simulation horizon.
    BayesUcbHorizon,
    /// Noiseless-relaxation index `μ + σ·λ̂_γ`.
    Optimistic,
    /// Posterior mean.
    Greedy,
}

impl Policy {
    pub const NAMES: [&'static str; 5] = ["gittins", "bayes-ucb-gamma", "bayes-ucb-horizon", "optimistic", "greedy"];

    pub fn name(&self) -> &'static str {
        match self {
            Policy::Gittins(_) => "gittins",
            Policy::BayesUcbDiscount => "bayes-ucb-gamma",
            Policy::BayesUcbHorizon => "bayes-ucb-horizon",
            Policy::Optimistic => "optimistic",
            Policy::Greedy => "greedy",
        }
    }

    /// Parses a policy name. `gittins` needs `table`.
    pub fn from_name(name: &str, table: Option<Arc<IndexTable>>) -> Result<Self> {
        Ok(match name {
            "gittins" => Policy::Gittins(table.ok_or_else(|| Error::Config("the gittins policy needs an index table".into()))?),
            "bayes-ucb-gamma" => Policy::BayesUcbDiscount,
            "bayes-ucb-horizon" => Policy::BayesUcbHorizon,
            "optimistic" => Policy::Optimistic,
            "greedy" => Policy::Greedy,
            other => {
                return Err(Error::Config(format!("unknown policy {other:?}; expected one of {}", Policy::NAMES.join(", "))))
            }
        })
    }
}

impl Serialize for Policy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Policy::Gittins(table) => {
                let mut s = serializer.serialize_struct("Policy", 5)?;
                s.serialize_field("name", self.name())?;
                s.serialize_field("table_discount", &table.discount())?;
                s.serialize_field("table_entries", &table.len())?;
                s.serialize_field("table_ratio_range", &table.range())?;
                s.serialize_field("table_solver", table.solver_config())?;
                s.end()
            }
            _ => {
                let mut s = serializer.serialize_struct("Policy", 1)?;
                s.serialize_field("name", self.name())?;
                s.end()
            }
        }
    }
}

/// A policy with its per-discount constants resolved, ready to score beliefs.
pub(crate) enum Scorer<'a> {
    Table(&'a IndexTable),
    /// `μ + σ·c` for a fixed standardized offset `c`.
    Offset(f64),
    Greedy,
}

impl<'a> Scorer<'a> {
    pub(crate) fn new(policy: &'a Policy, discount: f64, horizon: u64) -> Result<Self> {
        Ok(match policy {
            Policy::Gittins(table) => {
                if table.discount() != discount {
                    return Err(Error::Config(format!(
                        "index table was built for discount {} but the simulation uses {discount}",
                        table.discount()
                    )));
                }
                Scorer::Table(table)
            }
            Policy::BayesUcbDiscount => Scorer::Offset(quantile(discount)),
            Policy::BayesUcbHorizon => Scorer::Offset(quantile(1.0 - 1.0 / horizon.max(2) as f64)),
            Policy::Optimistic => Scorer::Offset(optimistic_index(PosteriorState::standard(), discount)?),
            Policy::Greedy => Scorer::Greedy,
        })
    }

    pub(crate) fn score(&self, belief: &ArmBelief) -> Result<f64> {
        let state = belief.posterior;
        if state.variance() < DEGENERATE_VARIANCE {
            return Ok(state.mean());
        }
        Ok(match self {
            Scorer::Table(table) => {
                let ratio = belief.noise.variance() / state.variance();
                let standardized = match table.lookup(ratio) {
                    Ok(v) => v,
                    // The standardized index is nonincreasing in the ratio, so the
                    // last entry bounds it from above for nearly known arms.
                    Err(Error::Extrapolation { max, .. }) if ratio > max => *table.indices().last().unwrap(),
                    Err(e) => return Err(e),
                };
                state.mean() + state.std_dev() * standardized
            }
            Scorer::Offset(c) => state.mean() + state.std_dev() * c,
            Scorer::Greedy => state.mean(),
        })
    }

    /// Fills `out` with per-arm indices and returns the argmax (lowest id on ties).
    pub(crate) fn choose_into(&self, beliefs: &[ArmBelief], out: &mut [f64]) -> Result<usize> {
        let mut best = 0;
        for (i, b) in beliefs.iter().enumerate() {
            out[i] = self.score(b)?;
            if out[i] > out[best] {
                best = i;
            }
        }
        Ok(best)
    }
}

/// Arm chosen by `policy` given current beliefs; ties go to the lowest id.
pub fn policy_choose(policy: &Policy, beliefs: &[ArmBelief], discount: f64, horizon: u64) -> Result<usize> {
    if beliefs.is_empty() {
        return Err(Error::Config("policy_choose needs at least one arm".into()));
    }
    let scorer = Scorer::new(policy, discount, horizon)?;
    let mut scratch = vec![0.0; beliefs.len()];
    scorer.choose_into(beliefs, &mut scratch)
}
