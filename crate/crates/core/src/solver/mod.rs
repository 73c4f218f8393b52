//! Exact Gittins indices for Gaussian arms.
//!
//! The index is the largest per-play tax λ at which the one-armed retirement
//! game still has nonnegative value. The game value is computed by backward
//! induction on a finite horizon `N`; two terminal rules bracket the truncation
//! error:
//!
//! * [`TerminalRule::CommitOrRetireLower`] ends the game with the better of
//!   retiring and playing forever, a feasible policy, hence a lower bound;
//! * [`TerminalRule::ClairvoyantUpper`] ends it with the value of an agent who
//!   learns θ for free, an information relaxation, hence an upper bound.
//!
//! Running the tax bisection against each rule brackets the index itself.

mod dp;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::bounds;
use crate::posterior::{NoiseModel, PosteriorState};
use crate::roots::{bisect_decreasing, refine, Bisection};

pub use table::{build_table, IndexTable, TABLE_FORMAT_VERSION};

/// Variances below this are treated as a known arm: the index equals the mean.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;

/// Value brackets wider than this multiple of the bisection tolerance are rejected.
const RESOLUTION_FACTOR: f64 = 1e3;

/// The one-armed retirement game: pay `tax` per play, discount by `discount`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameSpec {
    pub tax: f64,
    pub discount: f64,
    pub noise: NoiseModel,
}

impl GameSpec {
    pub fn new(tax: f64, discount: f64, noise: NoiseModel) -> Result<Self> {
        crate::error::ensure_finite("tax must be finite", tax)?;
        check_discount(discount)?;
        Ok(Self { tax, discount, noise })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalRule {
    CommitOrRetireLower,
    ClairvoyantUpper,
}

/// How the one-step expectation over the next posterior mean is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transition {
    /// Exact Gaussian integration of the piecewise-cubic value, split at the stopping boundary.
    ExactCubic,
    /// Gauss–Hermite quadrature with `quadrature_nodes` nodes.
    GaussHermite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// DP truncation horizon `N`.
    pub horizon: usize,
    /// Grid half-width in posterior standard deviations around the tax.
    pub mean_grid_halfwidth: f64,
    pub mean_grid_points: usize,
    /// Only used by [`Transition::GaussHermite`].
    pub quadrature_nodes: usize,
    pub transition: Transition,
    /// Tax bisection stops once the interval is this narrow (reward units).
    pub bisection_tolerance: f64,
    /// Plays made before retirement is first allowed. Two reads the value
    /// function as `sup_{τ ≥ 1} E Σ_{t=0}^{τ} γᵗ(μₜ − λ)`; one gives the
    /// classical index.
    pub forced_plays: u32,
}

impl SolverConfig {
    pub const DEFAULT_TOLERANCE: f64 = 1e-4;

    /// Defaults for discount `gamma`, with the horizon set by [`default_horizon`].
    pub fn for_discount(gamma: f64) -> Self {
        Self::with_tolerance(gamma, Self::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(gamma: f64, tolerance: f64) -> Self {
        Self {
            horizon: default_horizon(gamma, tolerance),
            mean_grid_halfwidth: 8.0,
            mean_grid_points: 129,
            quadrature_nodes: 16,
            transition: Transition::ExactCubic,
            bisection_tolerance: tolerance,
            forced_plays: 2,
        }
    }

    /// Doubles horizon, grid resolution and quadrature nodes. Grid nodes stay nested.
    pub fn refined(&self) -> Self {
        Self {
            horizon: 2 * self.horizon,
            mean_grid_points: 2 * self.mean_grid_points - 1,
            quadrature_nodes: 2 * self.quadrature_nodes,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bisection_tolerance > 0.0 && self.bisection_tolerance.is_finite()) {
            return Err(Error::Config(format!("bisection_tolerance must be positive, got {}", self.bisection_tolerance)));
        }
        if self.mean_grid_points < 33 {
            return Err(Error::Config(format!("mean_grid_points must be at least 33, got {}", self.mean_grid_points)));
        }
        if self.quadrature_nodes < 8 {
            return Err(Error::Config(format!("quadrature_nodes must be at least 8, got {}", self.quadrature_nodes)));
        }
        if !(self.mean_grid_halfwidth > 0.0 && self.mean_grid_halfwidth.is_finite()) {
            return Err(Error::Config(format!("mean_grid_halfwidth must be positive, got {}", self.mean_grid_halfwidth)));
        }
        if self.forced_plays == 0 {
            return Err(Error::Config("forced_plays must be at least 1".into()));
        }
        if self.horizon < self.forced_plays as usize {
            return Err(Error::Config(format!(
                "horizon {} is shorter than the {} forced plays",
                self.horizon, self.forced_plays
            )));
        }
        Ok(())
    }
}

/// Smallest `N` with `γᴺ·20/(1−γ) ≤ tolerance`, i.e. `⌈log(tol·(1−γ)/20)/log γ⌉`.
pub fn default_horizon(gamma: f64, tolerance: f64) -> usize {
    let n = ((tolerance * (1.0 - gamma) / 20.0).ln() / gamma.ln()).ceil();
    if n.is_finite() {
        (n as usize).max(2)
    } else {
        2
    }
}

pub(crate) fn check_discount(gamma: f64) -> Result<f64> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(gamma)
    } else {
        Err(Error::Domain { what: "discount must lie in (0, 1)", value: gamma })
    }
}

/// Bracket `[lower, upper]` on the game value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueBracket {
    pub lower: f64,
    pub upper: f64,
}

impl ValueBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

fn problem(state: PosteriorState, game: &GameSpec) -> dp::Problem {
    dp::Problem {
        mean: state.mean(),
        variance: state.variance(),
        tax: game.tax,
        discount: game.discount,
        noise_precision: game.noise.precision(),
    }
}

/// Game value under a single terminal rule.
pub fn value_with_rule(state: PosteriorState, game: &GameSpec, config: &SolverConfig, rule: TerminalRule) -> Result<f64> {
    config.validate()?;
    check_discount(game.discount)?;
    Ok(dp::evaluate(&problem(state, game), config, rule))
}

/// Bracket on `V_γ^λ(μ, σ)` from the two terminal rules.
pub fn value_function(state: PosteriorState, game: &GameSpec, config: &SolverConfig) -> Result<ValueBracket> {
    let lower = value_with_rule(state, game, config, TerminalRule::CommitOrRetireLower)?;
    let upper = value_with_rule(state, game, config, TerminalRule::ClairvoyantUpper)?;
    let limit = RESOLUTION_FACTOR * config.bisection_tolerance;
    let width = upper - lower;
    let scale = 1e-12 * lower.abs().max(upper.abs()).max(1.0);
    if width < -scale {
        return Err(Error::Resolution { width, limit: 0.0 });
    }
    if width > limit {
        return Err(Error::Resolution { width, limit });
    }
    Ok(ValueBracket { lower: lower.min(upper), upper: upper.max(lower) })
}

/// An index with its bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    /// Midpoint of `bracket`.
    pub index: f64,
    pub bracket: (f64, f64),
    /// Bisection interval against the lower terminal rule.
    pub lower_rule: (f64, f64),
    /// Bisection interval against the upper terminal rule.
    pub upper_rule: (f64, f64),
    /// Distance between the two rules' root estimates, i.e. truncation slack.
    pub truncation_slack: f64,
    pub evaluations: usize,
}

impl IndexEstimate {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// Root search on the tax for the given state. The search starts from
/// `[μ, optimistic index]`, which holds the index whenever the DP is resolved,
/// and widens if the upper end still has nonnegative value.
fn solve_bracketed(state: PosteriorState, discount: f64, noise: NoiseModel, config: &SolverConfig) -> Result<IndexEstimate> {
    config.validate()?;
    check_discount(discount)?;
    let mu = state.mean();
    let sigma = state.std_dev();
    let tol = config.bisection_tolerance;
    let optimistic = bounds::optimistic_index(state, discount)?;
    let prob = |tax: f64| dp::Problem {
        mean: mu,
        variance: state.variance(),
        tax,
        discount,
        noise_precision: noise.precision(),
    };
    let value = |rule: TerminalRule| move |tax: f64| Ok(dp::evaluate(&prob(tax), config, rule));

    let lower_value = value(TerminalRule::CommitOrRetireLower);
    let mut hi = optimistic + 0.01 * sigma + tol;
    let mut widened = 0;
    while lower_value(hi)? >= 0.0 {
        widened += 1;
        if widened > 30 {
            return Err(Error::Bracket { lo: mu, hi, f_lo: f64::NAN, f_hi: lower_value(hi)? });
        }
        hi = mu + 2.0 * (hi - mu);
    }
    let lower: Bisection = bisect_decreasing(lower_value, mu, hi, tol)?;
    let lower = Bisection { evaluations: lower.evaluations + widened, ..lower };

    // The upper-rule root is at least the lower-rule root; search outward from it.
    let upper_value = value(TerminalRule::ClairvoyantUpper);
    let mut evaluations = lower.evaluations;
    let mut step = tol;
    let (mut probe_lo, mut value_lo) = (lower.lo, lower.f_lo);
    let mut probe_hi = lower.hi;
    let value_hi = loop {
        evaluations += 1;
        let v = upper_value(probe_hi)?;
        if v < 0.0 {
            break v;
        }
        if probe_hi >= hi {
            return Err(Error::Bracket { lo: probe_lo, hi, f_lo: value_lo, f_hi: v });
        }
        (probe_lo, value_lo) = (probe_hi, v);
        probe_hi = (probe_hi + step).min(hi);
        step *= 2.0;
    };
    let upper = refine(upper_value, probe_lo, probe_hi, value_lo, value_hi, tol, 0)?;
    evaluations += upper.evaluations;

    let bracket = (lower.lo, upper.hi.max(lower.hi));
    Ok(IndexEstimate {
        index: 0.5 * (bracket.0 + bracket.1),
        bracket,
        lower_rule: (lower.lo, lower.hi),
        upper_rule: (upper.lo, upper.hi),
        truncation_slack: (upper.midpoint() - lower.midpoint()).max(0.0),
        evaluations,
    })
}

/// Standardized index `λ_γ(0, 1)` for an arm with prior `N(0, 1)` and noise variance `noise_to_signal`.
pub fn gittins_index_standard(discount: f64, noise_to_signal: f64, config: &SolverConfig) -> Result<IndexEstimate> {
    let noise = NoiseModel::new(noise_to_signal)?;
    solve_bracketed(PosteriorState::standard(), discount, noise, config)
}

/// Index for an arbitrary state by direct bisection on the unstandardized game.
pub fn solve_index(state: PosteriorState, discount: f64, noise: NoiseModel, config: &SolverConfig) -> Result<IndexEstimate> {
    if state.variance() < DEGENERATE_VARIANCE {
        check_discount(discount)?;
        let m = state.mean();
        return Ok(IndexEstimate {
            index: m,
            bracket: (m, m),
            lower_rule: (m, m),
            upper_rule: (m, m),
            truncation_slack: 0.0,
            evaluations: 0,
        });
    }
    solve_bracketed(state, discount, noise, config)
}

/// `μ + σ·λ_γ(0, 1, σ_W²/σ²)`, read from `table` when given, otherwise solved directly.
pub fn gittins_index(
    state: PosteriorState,
    discount: f64,
    noise: NoiseModel,
    table: Option<&IndexTable>,
    config: &SolverConfig,
) -> Result<f64> {
    check_discount(discount)?;
    if state.variance() < DEGENERATE_VARIANCE {
        return Ok(state.mean());
    }
    let ratio = noise.variance() / state.variance();
    let standardized = match table {
        Some(table) => {
            if table.discount() != discount {
                return Err(Error::Config(format!(
                    "table was built for discount {} but {} was requested",
                    table.discount(),
                    discount
                )));
            }
            table.lookup(ratio)?
        }
        None => gittins_index_standard(discount, ratio, config)?.index,
    };
    Ok(state.mean() + state.std_dev() * standardized)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(gamma: f64) -> SolverConfig {
        SolverConfig::for_discount(gamma)
    }

    #[test]
    fn known_excellent_arm_plays_forever() {
        let noise = NoiseModel::new(1.0).unwrap();
        let game = GameSpec::new(0.3, 0.9, noise).unwrap();
        let state = PosteriorState::new(10.3, 1e-9).unwrap();
        let v = value_function(state, &game, &cfg(0.9)).unwrap();
        assert!((v.lower - 100.0).abs() < 0.1, "{v:?}");
        assert!((v.upper - 100.0).abs() < 0.1, "{v:?}");
    }

    #[test]
    fn known_bad_arm_pays_the_forced_plays() {
        let noise = NoiseModel::new(1.0).unwrap();
        let game = GameSpec::new(1.0, 0.9, noise).unwrap();
        let state = PosteriorState::new(-9.0, 1e-9).unwrap();
        let v = value_function(state, &game, &cfg(0.9)).unwrap();
        assert!((v.lower + 19.0).abs() < 1e-6, "{v:?}");
        assert!((v.upper + 19.0).abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn degenerate_variance_short_circuits() {
        let noise = NoiseModel::new(1.0).unwrap();
        let state = PosteriorState::new(2.5, 1e-14).unwrap();
        assert_eq!(gittins_index(state, 0.9, noise, None, &cfg(0.9)).unwrap(), 2.5);
    }

    #[test]
    fn rejects_bad_discount_and_config() {
        assert!(GameSpec::new(0.0, 1.0, NoiseModel::new(1.0).unwrap()).is_err());
        assert!(gittins_index_standard(0.0, 1.0, &cfg(0.5)).is_err());
        let mut c = cfg(0.5);
        c.mean_grid_points = 9;
        assert!(matches!(gittins_index_standard(0.5, 1.0, &c), Err(Error::Config(_))));
        let mut c = cfg(0.5);
        c.bisection_tolerance = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn coarse_horizon_is_a_resolution_error() {
        let noise = NoiseModel::new(1.0).unwrap();
        let game = GameSpec::new(0.5, 0.99, noise).unwrap();
        let mut c = cfg(0.99);
        c.horizon = 3;
        let err = value_function(PosteriorState::standard(), &game, &c).unwrap_err();
        assert!(matches!(err, Error::Resolution { .. }), "{err}");
    }

    #[test]
    fn horizon_formula() {
        assert_eq!(default_horizon(0.9, 1e-4), ((1e-4f64 * 0.1 / 20.0).ln() / 0.9f64.ln()).ceil() as usize);
        assert!(default_horizon(0.999, 1e-4) > 10_000);
    }
}
