//! Index solver against the brute-force fixed-grid DP in `tests/oracle/gittins_oracle.py`,
//! plus structural properties of the index.

use gittins_lab::bounds::optimistic_index;
use gittins_lab::solver::{
    gittins_index, gittins_index_standard, solve_index, value_function, GameSpec, SolverConfig,
};
use gittins_lab::{NoiseModel, PosteriorState};

const ORACLE: &str = include_str!("oracle/gittins.txt");

/// The oracle's grid step (0.0025) limits it to about 1e-5.
const ORACLE_SLACK: f64 = 2e-5;

#[test]
fn matches_brute_force_oracle() {
    let mut rows = 0;
    for line in ORACLE.lines() {
        let f: Vec<f64> = line.split_whitespace().skip(1).map(|v| v.parse().unwrap()).collect();
        let (gamma, ratio, forced, want) = (f[0], f[1], f[2] as u32, f[3]);
        let config = SolverConfig { forced_plays: forced, ..SolverConfig::with_tolerance(gamma, 1e-6) };
        let est = gittins_index_standard(gamma, ratio, &config).unwrap();
        let (lo, hi) = est.bracket;
        assert!(
            want >= lo - ORACLE_SLACK && want <= hi + ORACLE_SLACK,
            "γ {gamma} ratio {ratio} forced {forced}: [{lo}, {hi}] vs {want}"
        );
        rows += 1;
    }
    assert_eq!(rows, 7);
}

#[test]
fn refinement_lands_inside_the_bracket() {
    for (gamma, ratio) in [(0.9, 1.0), (0.95, 0.2), (0.95, 10.0)] {
        let config = SolverConfig::for_discount(gamma);
        let coarse = gittins_index_standard(gamma, ratio, &config).unwrap();
        let fine = gittins_index_standard(gamma, ratio, &config.refined()).unwrap();
        assert!(
            (fine.index - coarse.index).abs() < coarse.width(),
            "γ {gamma} ratio {ratio}: {} vs {} (width {})",
            fine.index,
            coarse.index,
            coarse.width()
        );
    }
}

#[test]
fn index_falls_with_noise_and_rises_with_patience() {
    let config = SolverConfig::for_discount(0.9);
    let by_ratio: Vec<f64> =
        [0.1, 1.0, 10.0, 100.0].iter().map(|&r| gittins_index_standard(0.9, r, &config).unwrap().index).collect();
    assert!(by_ratio.windows(2).all(|w| w[0] > w[1]), "{by_ratio:?}");
    assert!(by_ratio[3] > 0.0);

    let by_gamma: Vec<f64> = [0.5, 0.8, 0.9, 0.95]
        .iter()
        .map(|&g| gittins_index_standard(g, 1.0, &SolverConfig::for_discount(g)).unwrap().index)
        .collect();
    assert!(by_gamma.windows(2).all(|w| w[0] < w[1]), "{by_gamma:?}");
}

#[test]
fn below_the_noiseless_index_and_above_the_mean() {
    for (gamma, ratio) in [(0.7, 1.0), (0.9, 0.01), (0.9, 1.0), (0.95, 50.0)] {
        let est = gittins_index_standard(gamma, ratio, &SolverConfig::for_discount(gamma)).unwrap();
        let optimistic = optimistic_index(PosteriorState::standard(), gamma).unwrap();
        assert!(est.bracket.0 > 0.0);
        assert!(est.bracket.1 <= optimistic, "γ {gamma} ratio {ratio}: {} > {optimistic}", est.bracket.1);
    }
}

#[test]
fn direct_solve_matches_standardized_solve() {
    let gamma = 0.9;
    let config = SolverConfig::for_discount(gamma);
    for (mu, var, noise_var) in [(1.5, 4.0, 2.0), (-3.0, 0.25, 1.0), (0.2, 9.0, 0.9)] {
        let state = PosteriorState::new(mu, var).unwrap();
        let noise = NoiseModel::new(noise_var).unwrap();
        let direct = solve_index(state, gamma, noise, &config).unwrap();
        let via = gittins_index(state, gamma, noise, None, &config).unwrap();
        let tol = direct.width() + var.sqrt() * 2.0 * config.bisection_tolerance;
        assert!((direct.index - via).abs() <= tol, "({mu}, {var}, {noise_var}): {} vs {via}", direct.index);
    }
}

#[test]
fn certain_arms_have_index_equal_to_their_mean() {
    let state = PosteriorState::new(0.7, 1e-14).unwrap();
    let noise = NoiseModel::new(1.0).unwrap();
    let est = solve_index(state, 0.99, noise, &SolverConfig::for_discount(0.99)).unwrap();
    assert_eq!(est.index, 0.7);
    assert_eq!(est.width(), 0.0);
}

#[test]
fn value_of_a_sure_winner_is_its_perpetuity() {
    let gamma = 0.9;
    let config = SolverConfig::for_discount(gamma);
    let game = GameSpec::new(0.0, gamma, NoiseModel::new(1.0).unwrap()).unwrap();
    // Twenty prior standard deviations above the tax: retiring is never optimal.
    let v = value_function(PosteriorState::new(20.0, 1.0).unwrap(), &game, &config).unwrap();
    let want = 20.0 / (1.0 - gamma);
    assert!((v.lower - want).abs() < 1e-6 * want && (v.upper - want).abs() < 1e-6 * want, "{v:?}");
    // Far below the tax the arm is played only for the forced plays.
    let v = value_function(PosteriorState::new(-20.0, 1.0).unwrap(), &game, &config).unwrap();
    let forced = -20.0 * (1.0 + gamma);
    assert!((v.lower - forced).abs() < 1e-6 && v.width() < 1e-6, "{v:?}");
}
