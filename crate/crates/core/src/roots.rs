//! Bracketing root search for the largest point where a nonincreasing function
//! is still nonnegative.
//!
//! The steps are tuned for convex decreasing functions such as game values in
//! the tax: the chord between the bracket ends crosses zero at or beyond the
//! root, and the secant through the two latest nonnegative points crosses it at
//! or before the root, so alternating the two closes the bracket from both
//! sides. Steps stay at least `tol/2` inside the bracket and fall back to
//! bisection whenever the width fails to halve over three steps, so any
//! monotone function is still handled. The bracket `f(lo) ≥ 0 > f(hi)` holds
//! throughout.

use crate::error::{Error, Result};

/// Final interval of a bisection run: `f(lo) ≥ 0 > f(hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub evaluations: usize,
}

impl Bisection {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

const MAX_ITERATIONS: usize = 200;

/// Locates `sup { x ∈ [lo, hi] : f(x) ≥ 0 }` for nonincreasing `f`, shrinking the
/// interval until it is no wider than `tol`. Fails if `f(lo) < 0` or `f(hi) ≥ 0`.
pub fn bisect_decreasing<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Bisection>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if !(f_lo >= 0.0 && f_hi < 0.0) {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    refine(f, lo, hi, f_lo, f_hi, tol, 2)
}

/// Same as [`bisect_decreasing`] for an interval already known to straddle the
/// sign change with `f(lo) = f_lo ≥ 0 > f(hi) = f_hi`. The values only steer the
/// step choice, so any nonnegative stand-in for `f_lo` is safe.
pub fn refine<F>(mut f: F, lo: f64, hi: f64, f_lo: f64, f_hi: f64, tol: f64, spent: usize) -> Result<Bisection>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b, mut ya, mut yb) = (lo, hi, f_lo, f_hi);
    // The previous holders of each end, for the secants.
    let mut before_a: Option<(f64, f64)> = None;
    let mut before_b: Option<(f64, f64)> = None;
    let mut widths = [f64::INFINITY; 3];
    let mut left_turn = true;
    let mut evaluations = spent;
    for _ in 0..MAX_ITERATIONS {
        let width = b - a;
        if width <= tol {
            break;
        }
        let half = 0.5 * (a + b);
        if half <= a || half >= b {
            break;
        }
        let chord = if ya.is_finite() && yb.is_finite() && ya > yb { Some(a + width * ya / (ya - yb)) } else { None };
        // A secant line lies below a convex function outside the two points it
        // joins, so where it crosses zero the function is still nonnegative.
        let secant = |p: Option<(f64, f64)>, x1: f64, y1: f64| {
            p.and_then(|(x0, y0)| (y0 != y1).then(|| x1 - y1 * (x1 - x0) / (y1 - y0))).filter(|x| x.is_finite())
        };
        let forward = match (secant(before_a, a, ya), secant(before_b, b, yb)) {
            (Some(u), Some(v)) => Some(u.max(v)),
            (u, v) => u.or(v),
        };
        let mut x = match (forward, chord) {
            (Some(l), Some(r)) => {
                left_turn = !left_turn;
                if left_turn {
                    l
                } else {
                    r
                }
            }
            // Until a secant exists, halve: the chord alone creeps on convex functions.
            _ => half,
        };
        if width > 0.5 * widths[0] {
            x = half;
        }
        let nudge = 0.49 * tol;
        x = x.clamp(a + nudge, b - nudge);
        if !(x > a && x < b) {
            x = half;
        }
        evaluations += 1;
        let y = f(x)?;
        widths = [widths[1], widths[2], width];
        if y >= 0.0 {
            before_a = Some((a, ya));
            a = x;
            ya = y;
        } else {
            before_b = Some((b, yb));
            b = x;
            yb = y;
        }
    }
    Ok(Bisection { lo: a, hi: b, f_lo: ya, f_hi: yb, evaluations })
}
