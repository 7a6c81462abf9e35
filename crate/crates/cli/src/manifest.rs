//! Run manifests written next to every output file.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::io::to_json;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// `sha256:<hex>` of the input file bytes.
    pub input_digest: Option<String>,
    /// Every setting that influences the output: seed, restarts, tolerances, grids.
    pub config: Value,
    pub tool_version: String,
    /// `sha256:<hex>` of the output bytes.
    pub output_digest: String,
    /// Headline numbers of the run, e.g. the audited leakage of an emitted filter.
    pub results: Value,
    pub wall_clock_seconds: f64,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

pub fn digest_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(digest(&bytes))
}

/// `out.csv` -> `out.csv.manifest.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

impl RunManifest {
    pub fn write(&self, out: &Path) -> Result<PathBuf> {
        let path = sidecar_path(out);
        std::fs::write(&path, to_json(self)?).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Value> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}
