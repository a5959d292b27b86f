//! Run manifests: every file-producing run records its command line, a
//! hash of its resolved configuration, the seed, toolkit version, and
//! the named inputs that shaped the run. No timestamps — manifests of
//! identical runs are identical except for paths embedded in the
//! command line itself.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Serialize)]
struct Manifest {
    command: Vec<String>,
    config_sha256: String,
    seed: u64,
    versions: BTreeMap<String, String>,
    inputs: BTreeMap<String, String>,
}

/// Writes `manifest.json`-style provenance next to a run's outputs.
/// `resolved_config` is any serializable view of the settings that
/// determined the outputs; `inputs` names the run's key inputs
/// (dataset paths, templates, checkpoints).
pub fn write_manifest<C: Serialize>(
    path: &Path,
    resolved_config: &C,
    seed: u64,
    inputs: &[(&str, String)],
) -> Result<(), CliError> {
    let canonical = serde_json::to_string(resolved_config)
        .map_err(|e| CliError::Io(format!("cannot serialize config for manifest: {e}")))?;
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let config_sha256 = format!("{:x}", hasher.finalize());
    let mut versions = BTreeMap::new();
    versions.insert("involve".to_string(), env!("CARGO_PKG_VERSION").to_string());
    let manifest = Manifest {
        command: std::env::args().collect(),
        config_sha256,
        seed,
        versions,
        inputs: inputs.iter().map(|(k, v)| ((*k).to_string(), v.clone())).collect(),
    };
    let body = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Io(format!("cannot serialize manifest: {e}")))?;
    std::fs::write(path, body + "\n")
        .map_err(|e| CliError::Io(format!("cannot write manifest {}: {e}", path.display())))
}
