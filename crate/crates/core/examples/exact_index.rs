//! Exact Gittins index of one arm, with its bracket, next to the cheap approximations.
//!
//! cargo run --release --example exact_index -- [gamma] [mu] [sigma2] [noise_var]

use gittins_lab::bounds::{optimistic_index, quantile_index};
use gittins_lab::solver::{solve_index, SolverConfig};
use gittins_lab::{NoiseModel, PosteriorState};

fn main() -> gittins_lab::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
    let gamma = arg(0, 0.95);
    let state = PosteriorState::new(arg(1, 0.0), arg(2, 1.0))?;
    let noise = NoiseModel::new(arg(3, 1.0))?;

    let config = SolverConfig::for_discount(gamma);
    let est = solve_index(state, gamma, noise, &config)?;
    println!("gamma {gamma}, horizon {}, {} value evaluations", config.horizon, est.evaluations);
    println!("gittins    {:.6}  in [{:.6}, {:.6}]", est.index, est.bracket.0, est.bracket.1);
    println!("quantile   {:.6}", quantile_index(state, gamma)?);
    println!("optimistic {:.6}", optimistic_index(state, gamma)?);

    let classical = SolverConfig { forced_plays: 1, ..config };
    println!("gittins, retirement allowed after one play: {:.6}", solve_index(state, gamma, noise, &classical)?.index);
    Ok(())
}
