//! Run records: every experiment writes one JSON document carrying enough
//! provenance to reproduce it — the run id, the config hash and a full config
//! echo, the software version, and the result rows themselves.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Software {
    pub name: String,
    pub version: String,
}

impl Software {
    pub fn current() -> Self {
        Software { name: "andergraph".to_string(), version: env!("CARGO_PKG_VERSION").to_string() }
    }
}

/// One completed experiment. The numeric payload lives in `results`; rerunning
/// the same config and seed reproduces those rows bit-exactly, while `run_id`,
/// `created_unix` and `duration_seconds` are allowed to differ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub experiment: String,
    pub created_unix: u64,
    pub duration_seconds: f64,
    pub config_hash: String,
    pub software: Software,
    pub config: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
    pub results: Vec<serde_json::Value>,
}

impl RunRecord {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read record {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("malformed record {}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::config(format!("cannot serialize record: {e}")))?;
        text.push('\n');
        write_atomic(path, &text)
    }
}

pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Run id = creation timestamp plus the leading 12 hex digits of the config
/// hash: sortable by start time, and two different configs never collide.
pub fn make_run_id(created_unix: u64, config_hash: &str) -> String {
    format!("{created_unix}-{}", &config_hash[..12])
}

/// Writes through a sibling temp file and renames it into place, so readers
/// never observe a partially written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| CliError::config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))?;
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::config(format!("cannot rename into {}: {e}", path.display()))
    })
}

/// Writes to the given path atomically, or to stdout when no path is set.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
