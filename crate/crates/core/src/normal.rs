//! Standard normal special functions and the Gaussian tail estimates used
//! throughout the index computations.
//!
//! The plain `f64` functions ([`pdf`], [`cdf`], [`sf`], [`quantile`]) are the
//! unchecked fast path for inner loops. The `std_normal_*` functions validate
//! their arguments and return [`Result`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{ensure_finite, Error, Result};

/// 1/√(2π)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Domain { what: "probability must lie in [0, 1]", value })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Lower bound, exact value and upper bound of `E[(X - λ)⁺]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSandwich {
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
}

impl TailSandwich {
    pub fn is_ordered(&self) -> bool {
        self.lower <= self.exact && self.exact <= self.upper
    }
}

#[inline]
pub fn pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Φ(z).
#[inline]
pub fn cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(z), accurate in the far right tail.
#[inline]
pub fn sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// `E[(Z - d)⁺]` for a standard normal `Z`.
///
/// For `d ≥ 4` the difference `φ(d) − d(1 − Φ(d))` cancels badly, so it is
/// written as `φ(d)·K/(d + K)` with Laplace's continued fraction
/// `K = 1/(d + 2/(d + 3/(d + …)))`, which needs no subtraction.
#[inline]
pub fn unit_excess(d: f64) -> f64 {
    if d < 4.0 {
        return pdf(d) - d * sf(d);
    }
    let mut tail = 0.0;
    for k in (2..=40).rev() {
        tail = k as f64 / (d + tail);
    }
    let k = 1.0 / (d + tail);
    pdf(d) * k / (d + k)
}

/// Inverse of Φ on the open interval (0, 1), Wichura's AS241 (PPND16).
/// Returns ±∞ at the endpoints and NaN outside; use [`std_normal_quantile`]
/// for the checked version.
pub fn quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2509.0809287301227 * r + 33430.57558358813) * r
            + 67265.7709270087)
            * r
            + 45921.95393154987)
            * r
            + 13731.69376550946)
            * r
            + 1971.5909503065514)
            * r
            + 133.14166789178438)
            * r
            + 3.3871328727963665;
        let den = ((((((5226.495278852546 * r + 28729.085735721943) * r
            + 39307.89580009271)
            * r
            + 21213.794301586596)
            * r
            + 5394.196021424751)
            * r
            + 687.1870074920579)
            * r
            + 42.31333070160091)
            * r
            + 1.0;
        return q * num / den;
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745450142783414e-4 * r + 0.022723844989269184) * r
            + 0.2417807251774506)
            * r
            + 1.2704582524523684)
            * r
            + 3.6478483247632045)
            * r
            + 5.769497221460691)
            * r
            + 4.630337846156545)
            * r
            + 1.4234371107496835;
        let den = ((((((1.0507500716444168e-9 * r + 5.475938084995345e-4) * r
            + 0.015198666563616457)
            * r
            + 0.14810397642748008)
            * r
            + 0.6897673349851)
            * r
            + 1.6763848301838038)
            * r
            + 2.053191626637759)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.0103343992922881e-7 * r + 2.7115555687434876e-5) * r
            + 0.0012426609473880784)
            * r
            + 0.026532189526576124)
            * r
            + 0.2965605718285049)
            * r
            + 1.7848265399172913)
            * r
            + 5.463784911164114)
            * r
            + 6.657904643501103;
        let den = ((((((2.0442631033899397e-15 * r + 1.421511758316446e-7) * r
            + 1.8463183175100548e-5)
            * r
            + 7.868691311456133e-4)
            * r
            + 0.014875361290850615)
            * r
            + 0.1369298809227358)
            * r
            + 0.599832206555888)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// φ(z) = exp(−z²/2)/√(2π).
pub fn std_normal_pdf(z: f64) -> Result<f64> {
    ensure_finite("pdf argument must be finite", z).map(pdf)
}

/// Φ(z), absolute error well below 1e−12.
pub fn std_normal_cdf(z: f64) -> Result<Probability> {
    let z = ensure_finite("cdf argument must be finite", z)?;
    Ok(Probability(cdf(z)))
}

/// Φ⁻¹(p) for 0 < p < 1. The endpoints are rejected rather than mapped to ±∞.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(quantile(p))
    } else {
        Err(Error::Domain { what: "quantile needs 0 < p < 1", value: p })
    }
}

/// √(2·log(1/(1−p))), the leading-order approximation of Φ⁻¹(p) as p → 1.
pub fn quantile_asymptotic(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok((-2.0 * (-p).ln_1p()).sqrt())
    } else {
        Err(Error::Domain { what: "asymptotic quantile needs 0 < p < 1", value: p })
    }
}

/// Gordon's bounds `(z/(1+z²))·φ(z) ≤ 1 − Φ(z) ≤ φ(z)/z` for `z ≥ 0`.
///
/// The upper bound is capped at 1, which makes it vacuous (but finite) at z = 0.
pub fn gordon_bounds(z: f64) -> Result<(Probability, Probability)> {
    let z = ensure_finite("Gordon bounds argument must be finite", z)?;
    if z < 0.0 {
        return Err(Error::Domain { what: "Gordon bounds need z >= 0", value: z });
    }
    let density = pdf(z);
    let lower = z / (1.0 + z * z) * density;
    let upper = if z == 0.0 { 1.0 } else { (density / z).min(1.0) };
    Ok((Probability(lower), Probability(upper)))
}

/// `E[(X − λ)⁺]` for `X ~ N(0, σ²)`, via the closed form `σφ(λ/σ) − λ(1 − Φ(λ/σ))`.
pub fn expected_excess(sigma: f64, lam: f64) -> Result<f64> {
    let sigma = ensure_finite("sigma must be finite", sigma)?;
    let lam = ensure_finite("tax must be finite", lam)?;
    if sigma <= 0.0 {
        return Err(Error::Domain { what: "sigma must be positive", value: sigma });
    }
    Ok(excess(sigma, lam))
}

/// Unchecked `E[(X − λ)⁺]`, `X ~ N(0, σ²)`, `σ > 0`.
#[inline]
pub fn excess(sigma: f64, lam: f64) -> f64 {
    (sigma * unit_excess(lam / sigma)).max(0.0)
}

/// Two-sided bound on `E[(X − λ)⁺]` valid for `λ ≥ 2σ`:
/// `(σ⁴/λ³)·φ(λ/σ) ≤ E[(X − λ)⁺] ≤ σ·φ(λ/σ)`.
pub fn excess_sandwich(sigma: f64, lam: f64) -> Result<TailSandwich> {
    let exact = expected_excess(sigma, lam)?;
    if lam < 2.0 * sigma {
        return Err(Error::Precondition(format!(
            "tail sandwich needs lam >= 2*sigma (lam = {lam}, sigma = {sigma})"
        )));
    }
    let density = pdf(lam / sigma);
    Ok(TailSandwich {
        lower: sigma.powi(4) / lam.powi(3) * density,
        exact,
        upper: sigma * density,
    })
}

/// log φ(z), without underflow.
#[inline]
pub fn ln_pdf(z: f64) -> f64 {
    -0.5 * z * z - 0.5 * (2.0 * PI).ln()
}
