//! Exact Gittins indices for Gaussian bandits, their Bayes-UCB and
//! information-relaxation approximations, and a discounted k-armed simulator.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod normal;
pub mod output;
pub mod posterior;
pub mod quadrature;
pub mod roots;
pub mod sim;
pub mod solver;
pub mod svg;

pub use error::{Error, Result};
pub use posterior::{NoiseModel, PosteriorState};
