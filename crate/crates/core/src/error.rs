use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    /// A documented precondition does not hold, so the result would not be guaranteed.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The truncated dynamic program could not bracket the value tightly enough.
    #[error("resolution error: value bracket width {width:e} exceeds {limit:e}; refine the solver config")]
    Resolution { width: f64, limit: f64 },

    /// A root-finding interval failed to straddle the sign change.
    #[error("bracketing failed on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// An index table lookup fell outside the tabulated range.
    #[error("noise-to-signal ratio {ratio} outside table range [{min}, {max}]")]
    Extrapolation { ratio: f64, min: f64, max: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}
