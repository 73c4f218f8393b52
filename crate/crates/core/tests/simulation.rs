use std::sync::Arc;

use gittins_lab::sim::{agreement_rate, gittins_table_for, run, ArmSpec, Policy, SimulationConfig, Summary};
use gittins_lab::solver::SolverConfig;

fn gittins(arms: &[ArmSpec], gamma: f64, horizon: u64) -> Policy {
    let table = gittins_table_for(arms, gamma, horizon, 8.0, &SolverConfig::for_discount(gamma)).unwrap();
    Policy::Gittins(Arc::new(table))
}

#[test]
fn a_known_dominant_arm_is_always_played() {
    let arms = vec![ArmSpec::new(5.0, 1e-14, 1.0).unwrap(), ArmSpec::new(0.0, 1.0, 1.0).unwrap().with_true_mean(0.0)];
    let gamma = 0.9;
    for policy in [gittins(&arms, gamma, 50), Policy::BayesUcbDiscount, Policy::Optimistic, Policy::Greedy] {
        let mut config = SimulationConfig::new(arms.clone(), gamma, policy);
        config.horizon = 50;
        config.replications = 10;
        let out = run(&config).unwrap();
        for rec in &out.records {
            assert_eq!(rec.pulls, vec![50, 0], "{}", config.policy.name());
            assert!(rec.discounted_regret.abs() < 1e-9);
        }
    }
}

#[test]
fn residual_mass_matches_the_horizon() {
    let config = SimulationConfig::symmetric(2, 1.0, 1.0, 0.99, Policy::Greedy).unwrap();
    let out = run(&SimulationConfig { replications: 2, ..config.clone() }).unwrap();
    assert!(out.residual_mass <= 1e-6 / (1.0 - 0.99) * 1.0001);
    let want = 0.99f64.powi(config.horizon as i32) / 0.01;
    assert!((out.residual_mass - want).abs() < 1e-12 * want);
}

#[test]
fn agreement_rates_and_reward_against_greedy() {
    let gamma = 0.9;
    let base = SimulationConfig::symmetric(3, 1.0, 1.0, gamma, Policy::Greedy).unwrap();
    let config = SimulationConfig { replications: 400, seed: 5, ..base };
    let g = gittins(&config.arms, gamma, config.horizon);

    let with_ucb = agreement_rate(&config, &g, &Policy::BayesUcbDiscount).unwrap();
    let with_greedy = agreement_rate(&config, &g, &Policy::Greedy).unwrap();
    let with_self = agreement_rate(&config, &g, &g).unwrap();
    assert_eq!(with_self, 1.0);
    // At this discount the Gittins bonus is much smaller than Φ⁻¹(γ)σ, so greedy is the closer policy.
    assert!((0.0..1.0).contains(&with_ucb) && with_ucb < with_greedy, "greedy {with_greedy} vs ucb {with_ucb}");

    let summary = |p: Policy| {
        let c = SimulationConfig { policy: p.clone(), ..config.clone() };
        Summary::new(p.name(), &run(&c).unwrap())
    };
    let sg = summary(g.clone());
    let sgreedy = summary(Policy::Greedy);
    // Common random numbers make the comparison sharp; Gittins is optimal in expectation.
    assert!(
        sg.mean_discounted_reward > sgreedy.mean_discounted_reward - 2.0 * sgreedy.stderr_discounted_reward,
        "{sg:?} vs {sgreedy:?}"
    );
}
