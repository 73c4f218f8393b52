//! Lower bound, exact index, optimistic index and upper bound for the standard arm.

use gittins_lab::bounds::{lower_bound_index, optimistic_index, upper_bound_index};
use gittins_lab::solver::{gittins_index_standard, SolverConfig};
use gittins_lab::PosteriorState;

fn main() -> gittins_lab::Result<()> {
    println!("{:>6} {:>6} {:>9} {:>9} {:>9} {:>9}  note", "gamma", "ratio", "lower", "exact", "optimist", "upper");
    for gamma in [0.9, 0.95, 0.99] {
        let optimistic = optimistic_index(PosteriorState::standard(), gamma)?;
        let upper = upper_bound_index(gamma)?;
        for ratio in [0.5, 1.0, 2.0] {
            let exact = gittins_index_standard(gamma, ratio, &SolverConfig::for_discount(gamma))?;
            let lower = lower_bound_index(gamma, ratio)?;
            let note = if lower.degenerate { "lower bound from exact explore-then-commit" } else { "" };
            println!(
                "{gamma:>6} {ratio:>6} {:>9.5} {:>9.5} {optimistic:>9.5} {:>9.5}  {note}",
                lower.bound, exact.index, upper.value
            );
        }
    }
    Ok(())
}
