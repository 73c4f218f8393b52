//! How far the exact index sits from the Bayes-UCB quantile index as the discount grows.

use gittins_lab::cli::{sweep_row, SWEEP_COLUMNS};
use gittins_lab::solver::SolverConfig;

fn main() -> gittins_lab::Result<()> {
    println!("{}", SWEEP_COLUMNS.join(","));
    for gamma in [0.5, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99] {
        let row = sweep_row(gamma, 1.0, &SolverConfig::for_discount(gamma))?;
        let cells: Vec<String> = row.values().iter().map(|v| format!("{v:.6}")).collect();
        println!("{}", cells.join(","));
    }
    Ok(())
}
