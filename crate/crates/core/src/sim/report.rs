use serde::Serialize;

use super::SimulationOutput;
use crate::error::{Error, Result};
use crate::output::fmt_f64;

/// Mean and standard error of discounted reward and regret over replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub policy: String,
    pub replications: usize,
    pub mean_discounted_reward: f64,
    pub stderr_discounted_reward: f64,
    pub mean_discounted_regret: f64,
    pub stderr_discounted_regret: f64,
    pub mean_pulls: Vec<f64>,
    pub residual_mass: f64,
}

fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, f64::NAN);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl Summary {
    pub fn new(policy: &str, output: &SimulationOutput) -> Self {
        let records = &output.records;
        let (mean_discounted_reward, stderr_discounted_reward) = mean_stderr(records.iter().map(|r| r.discounted_reward));
        let (mean_discounted_regret, stderr_discounted_regret) = mean_stderr(records.iter().map(|r| r.discounted_regret));
        let arms = records.first().map_or(0, |r| r.pulls.len());
        let mean_pulls = (0..arms)
            .map(|i| records.iter().map(|r| r.pulls[i] as f64).sum::<f64>() / records.len() as f64)
            .collect();
        Self {
            policy: policy.to_string(),
            replications: records.len(),
            mean_discounted_reward,
            stderr_discounted_reward,
            mean_discounted_regret,
            stderr_discounted_regret,
            mean_pulls,
            residual_mass: output.residual_mass,
        }
    }

    /// `|mean_a − mean_b| / √(se_a² + se_b²)` for discounted reward.
    pub fn reward_z_score(&self, other: &Summary) -> f64 {
        let pooled = self.stderr_discounted_reward.hypot(other.stderr_discounted_reward);
        (self.mean_discounted_reward - other.mean_discounted_reward).abs() / pooled
    }
}

/// Trace CSV body: `replication,t,arm,reward,discounted_cum_reward,index_0..index_{k−1}`.
///
/// Fails if the run was made without `record_trace`.
pub fn trace_csv(output: &SimulationOutput) -> Result<String> {
    let k = output.records.first().map_or(0, |r| r.true_means.len());
    let mut out = String::from("replication,t,arm,reward,discounted_cum_reward");
    for i in 0..k {
        out.push_str(&format!(",index_{i}"));
    }
    out.push('\n');
    for record in &output.records {
        let trace = record
            .trace
            .as_ref()
            .ok_or_else(|| Error::Config("simulation was run without record_trace".into()))?;
        for t in 0..trace.len() {
            out.push_str(&format!(
                "{},{},{},{},{}",
                record.replication,
                t,
                trace.arms[t],
                fmt_f64(trace.rewards[t]),
                fmt_f64(trace.discounted_cum_rewards[t])
            ));
            for v in &trace.indices[t * k..(t + 1) * k] {
                out.push(',');
                out.push_str(&fmt_f64(*v));
            }
            out.push('\n');
        }
    }
    Ok(out)
}
