//! Conjugate updates for one arm and the predictive law of the mean a few plays ahead.

use gittins_lab::posterior::{mean_after_distribution, update, variance_after};
use gittins_lab::{NoiseModel, PosteriorState};

fn main() -> gittins_lab::Result<()> {
    let noise = NoiseModel::new(2.0)?;
    let mut state = PosteriorState::new(0.0, 1.0)?;
    for (t, reward) in [0.8, 1.9, -0.4, 1.1, 0.7].into_iter().enumerate() {
        state = update(state, noise, reward)?;
        let closed = variance_after(1.0, noise, t as u64 + 1);
        println!("t={} reward={reward:+.1} mean={:.4} var={:.4} (closed form {closed:.4})", t + 1, state.mean(), state.variance());
    }
    for ahead in [1, 5, 50] {
        let law = mean_after_distribution(state, noise, ahead);
        println!("mean after {ahead:>2} more plays ~ N({:.4}, {:.4})", law.mean, law.variance);
    }
    Ok(())
}
