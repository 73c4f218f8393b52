use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_discount, gittins_index_standard, SolverConfig};
use crate::error::{Error, Result};

pub const TABLE_FORMAT_VERSION: u32 = 1;

/// Standardized indices `λ_γ(0, 1)` tabulated over noise-to-signal ratios for one discount.
///
/// Lookups interpolate linearly in `log(ratio)` and refuse to extrapolate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexTable {
    format_version: u32,
    discount: f64,
    ratios: Vec<f64>,
    indices: Vec<f64>,
    brackets: Vec<(f64, f64)>,
    solver_config: SolverConfig,
}

/// Solves every ratio (in parallel on the current rayon pool) and collects the results in order.
pub fn build_table(discount: f64, ratios: &[f64], config: &SolverConfig) -> Result<IndexTable> {
    check_discount(discount)?;
    config.validate()?;
    if ratios.is_empty() {
        return Err(Error::Config("index table needs at least one ratio".into()));
    }
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) || ratios.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("ratios must be positive and strictly increasing".into()));
    }
    let estimates = ratios
        .par_iter()
        .map(|&r| gittins_index_standard(discount, r, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndexTable {
        format_version: TABLE_FORMAT_VERSION,
        discount,
        ratios: ratios.to_vec(),
        indices: estimates.iter().map(|e| e.index).collect(),
        brackets: estimates.iter().map(|e| e.bracket).collect(),
        solver_config: *config,
    })
}

impl IndexTable {
    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn indices(&self) -> &[f64] {
        &self.indices
    }

    pub fn brackets(&self) -> &[(f64, f64)] {
        &self.brackets
    }

    pub fn solver_config(&self) -> &SolverConfig {
        &self.solver_config
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.ratios[0], self.ratios[self.ratios.len() - 1])
    }

    /// Segment and weight for `ratio`, or an extrapolation error.
    fn locate(&self, ratio: f64) -> Result<(usize, f64)> {
        let (min, max) = self.range();
        let slop = 1e-12;
        if !(ratio >= min * (1.0 - slop) && ratio <= max * (1.0 + slop)) {
            return Err(Error::Extrapolation { ratio, min, max });
        }
        if self.ratios.len() == 1 {
            return Ok((0, 0.0));
        }
        let ratio = ratio.clamp(min, max);
        let upper = self.ratios.partition_point(|&r| r < ratio).clamp(1, self.ratios.len() - 1);
        let (r0, r1) = (self.ratios[upper - 1], self.ratios[upper]);
        let w = (ratio.ln() - r0.ln()) / (r1.ln() - r0.ln());
        Ok((upper - 1, w.clamp(0.0, 1.0)))
    }

    fn blend(values: &[f64], i: usize, w: f64) -> f64 {
        if w == 0.0 {
            values[i]
        } else if w == 1.0 {
            values[i + 1]
        } else {
            values[i] + w * (values[i + 1] - values[i])
        }
    }

    /// Interpolated standardized index at `ratio`.
    pub fn lookup(&self, ratio: f64) -> Result<f64> {
        let (i, w) = self.locate(ratio)?;
        Ok(Self::blend(&self.indices, i, w))
    }

    /// Interpolated bracket at `ratio`.
    pub fn lookup_bracket(&self, ratio: f64) -> Result<(f64, f64)> {
        let (i, w) = self.locate(ratio)?;
        let lo: Vec<f64> = self.brackets.iter().map(|b| b.0).collect();
        let hi: Vec<f64> = self.brackets.iter().map(|b| b.1).collect();
        Ok((Self::blend(&lo, i, w), Self::blend(&hi, i, w)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: IndexTable = serde_json::from_str(text)?;
        table.check()?;
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::output::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn check(&self) -> Result<()> {
        if self.format_version != TABLE_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported table format_version {} (expected {TABLE_FORMAT_VERSION})",
                self.format_version
            )));
        }
        check_discount(self.discount).map_err(|e| Error::Format(e.to_string()))?;
        let n = self.ratios.len();
        if n == 0 || self.indices.len() != n || self.brackets.len() != n {
            return Err(Error::Format("ratios, indices and brackets must have the same nonzero length".into()));
        }
        if self.ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) || self.ratios.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("ratios must be positive and strictly increasing".into()));
        }
        for (v, (lo, hi)) in self.indices.iter().zip(&self.brackets) {
            if !(lo <= v && v <= hi) {
                return Err(Error::Format(format!("index {v} outside its bracket [{lo}, {hi}]")));
            }
        }
        self.solver_config.validate().map_err(|e| Error::Format(e.to_string()))
    }
}
