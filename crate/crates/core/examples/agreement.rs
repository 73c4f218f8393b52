//! How often other policies pick the arm the Gittins policy plays, on its own trajectory.

use std::sync::Arc;

use gittins_lab::sim::{agreement_rate, gittins_table_for, Policy, SimulationConfig};
use gittins_lab::solver::SolverConfig;

fn main() -> gittins_lab::Result<()> {
    for gamma in [0.8, 0.9, 0.95] {
        let mut config = SimulationConfig::symmetric(2, 1.0, 1.0, gamma, Policy::Greedy)?;
        config.replications = 300;
        let table = gittins_table_for(&config.arms, gamma, config.horizon, 8.0, &SolverConfig::for_discount(gamma))?;
        let gittins = Policy::Gittins(Arc::new(table));
        let rates: Vec<String> = [Policy::BayesUcbDiscount, Policy::BayesUcbHorizon, Policy::Greedy]
            .iter()
            .map(|p| Ok(format!("{} {:.3}", p.name(), agreement_rate(&config, &gittins, p)?)))
            .collect::<gittins_lab::Result<_>>()?;
        println!("gamma {gamma} (horizon {}): {}", config.horizon, rates.join(", "));
    }
    Ok(())
}
