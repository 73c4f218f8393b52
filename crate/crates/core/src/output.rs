//! File output helpers: atomic writes and the metadata header shared by every artifact.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

pub const TOOL_NAME: &str = "gittins-lab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Provenance block embedded in every CSV (as `#` comment lines) and JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: C,
}

impl<C: Serialize> Metadata<C> {
    pub fn new(command: &'static str, seed: Option<u64>, config: C) -> Self {
        Self { tool: TOOL_NAME, version: TOOL_VERSION, command, seed, config }
    }

    /// `#`-prefixed header lines for CSV files.
    pub fn csv_header(&self) -> Result<String> {
        let mut out = format!("# {} {}\n# command: {}\n", self.tool, self.version, self.command);
        if let Some(seed) = self.seed {
            out.push_str(&format!("# seed: {seed}\n"));
        }
        out.push_str(&format!("# config: {}\n", serde_json::to_string(&self.config)?));
        Ok(out)
    }
}

/// Shortest decimal that round-trips to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
