//! Backward induction for the retirement game on a time-indexed grid of posterior means.
//!
//! Slice `t` holds the continuation value `Q_t(μ) = μ − λ + γ·E[C_{t+1}(μ')]` at
//! `M` uniformly spaced means in `[λ − wσ_t, λ + wσ_t]`, where `C = max(0, Q)`
//! is the value with the option to retire and `μ' ~ N(μ, σ_t² − σ_{t+1}²)`.
//! Between nodes `Q` is a cubic Hermite interpolant. Outside the grid the value
//! is 0 below and `(μ − λ)/(1 − γ)` above.
//!
//! The grid error is fourth order in the spacing but grows with the
//! noise-to-signal ratio `r`: near the stopping boundary `Q_t` has structure
//! on the one-step scale `σ_t/√(r + t + 1)`, which a grid scaled by `σ_t`
//! resolves less well as `r` grows. At γ = 0.99 and 129 points the index error
//! is about 1e-6 at r = 1, 1e-5 at r = 8, 6e-4 at r = 200 and 2e-3 at r = 1400.
//!
//! With [`Transition::ExactCubic`] the expectation integrates the piecewise cubic
//! exactly against the Gaussian kernel, split at the stopping boundary where `Q`
//! changes sign; the kink of `max(0, Q)` is therefore never smeared by quadrature.

use crate::normal::{pdf, sf, unit_excess};
use crate::quadrature::GaussHermite;

use super::{SolverConfig, TerminalRule, Transition};

/// Gaussian mass beyond ±Z_MAX standard deviations is ignored (< 1e−18).
const Z_MAX: f64 = 9.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Problem {
    pub mean: f64,
    pub variance: f64,
    pub tax: f64,
    pub discount: f64,
    pub noise_precision: f64,
}

impl Problem {
    fn variance_at(&self, t: usize) -> f64 {
        1.0 / (1.0 / self.variance + t as f64 * self.noise_precision)
    }

    /// Variance of the posterior-mean increment between slices `t` and `t + k`.
    fn increment_variance(&self, t: usize, k: usize) -> f64 {
        let a = self.variance_at(t);
        let b = self.variance_at(t + k);
        k as f64 * self.noise_precision * a * b
    }
}

struct Slice {
    x0: f64,
    h: f64,
    q: Vec<f64>,
    coef: Vec<[f64; 4]>,
    boundary: f64,
    tax: f64,
    perpetuity: f64,
}

impl Slice {
    fn new(points: usize) -> Self {
        Self {
            x0: 0.0,
            h: 1.0,
            q: vec![0.0; points],
            coef: vec![[0.0; 4]; points - 1],
            boundary: 0.0,
            tax: 0.0,
            perpetuity: 1.0,
        }
    }

    fn node(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.h
    }

    fn top(&self) -> f64 {
        self.node(self.q.len() - 1)
    }

    /// Cubic Hermite coefficients per cell and the sign change of `Q`.
    ///
    /// Node slopes are fourth-order central differences, dropping to second
    /// order (Catmull–Rom) next to the ends and to one-sided at the ends.
    fn finish(&mut self) {
        let m = self.q.len();
        let q = &self.q;
        let slope = |j: usize| -> f64 {
            if j >= 2 && j + 2 < m {
                (q[j - 2] - 8.0 * q[j - 1] + 8.0 * q[j + 1] - q[j + 2]) / 12.0
            } else if j >= 1 && j + 1 < m {
                0.5 * (q[j + 1] - q[j - 1])
            } else if j == 0 {
                q[1] - q[0]
            } else {
                q[j] - q[j - 1]
            }
        };
        for i in 0..m - 1 {
            let (p1, p2) = (q[i], q[i + 1]);
            let (m1, m2) = (slope(i), slope(i + 1));
            self.coef[i] = [p1, m1, 3.0 * (p2 - p1) - 2.0 * m1 - m2, 2.0 * (p1 - p2) + m1 + m2];
        }
        self.boundary = match q.iter().rposition(|&v| v < 0.0) {
            None => self.x0,
            Some(j) if j == m - 1 => self.top(),
            Some(j) => {
                let c = self.coef[j];
                let poly = |f: f64| c[0] + f * (c[1] + f * (c[2] + f * c[3]));
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if poly(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                self.node(j) + 0.5 * (lo + hi) * self.h
            }
        };
    }

    /// Value with the option to retire, `C(x)`.
    fn value_at(&self, x: f64) -> f64 {
        if x < self.x0 {
            return 0.0;
        }
        if x > self.top() {
            return (x - self.tax) * self.perpetuity;
        }
        let u = (x - self.x0) / self.h;
        let i = (u.floor() as usize).min(self.coef.len() - 1);
        let f = u - i as f64;
        let c = self.coef[i];
        (c[0] + f * (c[1] + f * (c[2] + f * c[3]))).max(0.0)
    }

    /// `E[C(μ + sZ)]` by exact integration of the piecewise cubic.
    ///
    /// Integration limits at ±Z_MAX are treated as ±∞, so a kernel that lies
    /// inside one cell needs no special-function evaluations at all.
    fn expect_exact(&self, mu: f64, s: f64) -> f64 {
        if s <= f64::MIN_POSITIVE {
            return self.value_at(mu);
        }
        let x_min = mu - Z_MAX * s;
        let x_max = mu + Z_MAX * s;
        let top = self.top();
        let start = self.boundary.max(x_min);
        let mut total = 0.0;

        let inside_end = top.min(x_max);
        if start < inside_end {
            let last = self.coef.len() - 1;
            let first = (((start - self.x0) / self.h).floor().max(0.0) as usize).min(last);
            let beta = s / self.h;
            let mut a = start;
            let mut left = if start > x_min { Endpoint::at((start - mu) / s) } else { Endpoint::MINUS_INF };
            let mut i = first;
            loop {
                let b = self.node(i + 1).min(inside_end);
                if b > a {
                    let right = if b < x_max { Endpoint::at((b - mu) / s) } else { Endpoint::PLUS_INF };
                    let m = Moments::between(&left, &right);
                    let c = self.coef[i];
                    let alpha = (mu - self.node(i)) / self.h;
                    let d0 = c[0] + alpha * (c[1] + alpha * (c[2] + alpha * c[3]));
                    let d1 = beta * (c[1] + alpha * (2.0 * c[2] + 3.0 * alpha * c[3]));
                    let d2 = beta * beta * (c[2] + 3.0 * alpha * c[3]);
                    let d3 = beta * beta * beta * c[3];
                    total += d0 * m.0[0] + d1 * m.0[1] + d2 * m.0[2] + d3 * m.0[3];
                    a = b;
                    left = right;
                }
                if b >= inside_end || i == last {
                    break;
                }
                i += 1;
            }
        }

        let above = top.max(start);
        if above < x_max {
            let left = if above > x_min { Endpoint::at((above - mu) / s) } else { Endpoint::MINUS_INF };
            let m = Moments::between(&left, &Endpoint::PLUS_INF);
            total += ((mu - self.tax) * m.0[0] + s * m.0[1]) * self.perpetuity;
        }
        total
    }

    fn expect(&self, mu: f64, s: f64, transition: &TransitionKernel) -> f64 {
        match transition {
            TransitionKernel::Exact => self.expect_exact(mu, s),
            TransitionKernel::Hermite(rule) => rule.expect(|z| self.value_at(mu + s * z)),
        }
    }
}

/// `z`, `φ(z)` and `1 − Φ(z)` at an integration limit.
struct Endpoint {
    z: f64,
    density: f64,
    tail: f64,
}

impl Endpoint {
    const MINUS_INF: Endpoint = Endpoint { z: 0.0, density: 0.0, tail: 1.0 };
    const PLUS_INF: Endpoint = Endpoint { z: 0.0, density: 0.0, tail: 0.0 };

    #[inline]
    fn at(z: f64) -> Self {
        Self { z, density: pdf(z), tail: sf(z) }
    }
}

/// `∫ zⁿ φ(z) dz` over `[a, b]` for n = 0..3.
struct Moments([f64; 4]);

impl Moments {
    #[inline]
    fn between(a: &Endpoint, b: &Endpoint) -> Self {
        let m0 = a.tail - b.tail;
        let m1 = a.density - b.density;
        let m2 = m0 + a.z * a.density - b.z * b.density;
        let m3 = 2.0 * m1 + a.z * a.z * a.density - b.z * b.z * b.density;
        Self([m0, m1, m2, m3])
    }
}

enum TransitionKernel {
    Exact,
    Hermite(GaussHermite),
}

/// Value of the retirement game under one terminal rule.
pub(crate) fn evaluate(problem: &Problem, config: &SolverConfig, rule: TerminalRule) -> f64 {
    let lam = problem.tax;
    let gamma = problem.discount;
    let perpetuity = 1.0 / (1.0 - gamma);
    let forced = config.forced_plays as usize;
    let forced_value = (problem.mean - lam) * (1.0 - gamma.powi(forced as i32)) * perpetuity;

    if problem.variance < super::DEGENERATE_VARIANCE {
        let continuation = ((problem.mean - lam) * perpetuity).max(0.0);
        return forced_value + gamma.powi(forced as i32) * continuation;
    }

    let kernel = match config.transition {
        Transition::ExactCubic => TransitionKernel::Exact,
        Transition::GaussHermite => TransitionKernel::Hermite(GaussHermite::new(config.quadrature_nodes)),
    };

    let points = config.mean_grid_points;
    let width = config.mean_grid_halfwidth;
    let horizon = config.horizon.max(forced);
    let spacing = 2.0 / (points - 1) as f64;

    let mut next = Slice::new(points);
    let mut current = Slice::new(points);

    let sigma_n = problem.variance_at(horizon).sqrt();
    next.x0 = lam - width * sigma_n;
    next.h = width * sigma_n * spacing;
    next.tax = lam;
    next.perpetuity = perpetuity;
    for j in 0..points {
        let x = next.node(j);
        next.q[j] = match rule {
            TerminalRule::CommitOrRetireLower => (x - lam) * perpetuity,
            TerminalRule::ClairvoyantUpper => sigma_n * unit_excess((lam - x) / sigma_n) * perpetuity,
        };
    }
    next.finish();

    for t in (forced..horizon).rev() {
        let sigma_t = problem.variance_at(t).sqrt();
        let s = problem.increment_variance(t, 1).sqrt();
        current.x0 = lam - width * sigma_t;
        current.h = width * sigma_t * spacing;
        current.tax = lam;
        current.perpetuity = perpetuity;
        for j in 0..points {
            let x = current.node(j);
            current.q[j] = x - lam + gamma * next.expect(x, s, &kernel);
        }
        current.finish();
        std::mem::swap(&mut current, &mut next);
    }

    let s0 = problem.increment_variance(0, forced).sqrt();
    forced_value + gamma.powi(forced as i32) * next.expect(problem.mean, s0, &kernel)
}
