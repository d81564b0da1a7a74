//! JSON artifacts of the pipeline and the hash chain between them.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use deformation_engine::StackRecord;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use time_chart::Plan;

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanDoc {
    pub precision_bits: u32,
    pub n_max: u32,
    /// Hash of the configuration line the plan was computed from.
    pub input_hash: String,
    pub plan: Plan,
}

impl PlanDoc {
    pub fn config_line(precision_bits: u32, n_max: u32) -> String {
        format!("precision_bits={precision_bits};n_max={n_max}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackDoc {
    pub n_max: u32,
    /// Hash of the plan file the stack was built from.
    pub input_hash: String,
    pub stack: StackRecord,
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or to stdout without one.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parsed document and the hash of its bytes.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<(T, String)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    Ok((doc, sha256_hex(&bytes)))
}

pub fn require_hash(what: &str, expected: &str, found: &str) -> Result<()> {
    if expected != found {
        bail!("{what} hash mismatch: artifact was made from {expected}, input has {found}");
    }
    Ok(())
}
