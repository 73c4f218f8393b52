//! Discounted reward and regret of every policy on the same symmetric three-arm bandit.

use std::sync::Arc;

use gittins_lab::sim::{gittins_table_for, run, Policy, SimulationConfig, Summary};
use gittins_lab::solver::SolverConfig;

fn main() -> gittins_lab::Result<()> {
    let gamma = 0.95;
    let mut base = SimulationConfig::symmetric(3, 1.0, 1.0, gamma, Policy::Greedy)?;
    base.replications = 400;
    base.seed = 42;
    let table = gittins_table_for(&base.arms, gamma, base.horizon, 8.0, &SolverConfig::for_discount(gamma))?;
    let policies = [
        Policy::Gittins(Arc::new(table)),
        Policy::BayesUcbDiscount,
        Policy::BayesUcbHorizon,
        Policy::Optimistic,
        Policy::Greedy,
    ];
    println!("{:<18} {:>16} {:>16}", "policy", "reward", "regret");
    for policy in policies {
        let config = SimulationConfig { policy, ..base.clone() };
        let s = Summary::new(config.policy.name(), &run(&config)?);
        println!(
            "{:<18} {:>8.3} ± {:<5.3} {:>8.3} ± {:<5.3}",
            s.policy, s.mean_discounted_reward, s.stderr_discounted_reward, s.mean_discounted_regret, s.stderr_discounted_regret
        );
    }
    Ok(())
}
