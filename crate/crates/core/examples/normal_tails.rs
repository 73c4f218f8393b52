//! Tail probabilities, quantiles and the Gordon bounds far into the tail.

use gittins_lab::normal::{gordon_bounds, quantile_asymptotic, sf, std_normal_quantile, unit_excess};

fn main() -> gittins_lab::Result<()> {
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "z", "gordon lo", "1-Phi(z)", "gordon hi", "E(Z-z)+");
    for z in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        let (lo, hi) = gordon_bounds(z)?;
        println!("{z:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}", lo.value(), sf(z), hi.value(), unit_excess(z));
    }
    println!();
    println!("{:>10} {:>10} {:>10}", "1-p", "quantile", "asymptotic");
    for k in [1, 2, 4, 8, 12] {
        let p = 1.0 - 10f64.powi(-k);
        println!("{:>10.0e} {:>10.5} {:>10.5}", 1.0 - p, std_normal_quantile(p)?, quantile_asymptotic(p)?);
    }
    Ok(())
}
