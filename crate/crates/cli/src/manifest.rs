//! Run manifests: one JSON file per experiment run recording the resolved
//! configuration digest, seed, produced files, and timing.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CmdResult;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    /// sha256 of the canonical JSON serialization of the resolved config;
    /// stable under key reordering of the config file.
    pub config_digest: String,
    /// The resolved configuration itself.
    pub config: serde_json::Value,
    pub seed: u64,
    pub outputs: Vec<PathBuf>,
    pub started: String,
    pub finished: String,
    pub version: String,
    pub wall_seconds: f64,
    pub failed_trials: u64,
    pub total_trials: u64,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub summary: serde_json::Value,
}

pub struct ManifestBuilder {
    command: String,
    started_at: Instant,
    started: String,
}

impl ManifestBuilder {
    pub fn start() -> Self {
        let args: Vec<String> = std::env::args().collect();
        ManifestBuilder {
            command: args.join(" "),
            started_at: Instant::now(),
            started: now_rfc3339(),
        }
    }

    pub fn finish<C: Serialize>(
        self,
        config: &C,
        seed: u64,
        outputs: Vec<PathBuf>,
        failed_trials: u64,
        total_trials: u64,
        summary: serde_json::Value,
    ) -> CmdResult<RunManifest> {
        Ok(RunManifest {
            command: self.command,
            config_digest: digest_of(config)?,
            config: serde_json::to_value(config)?,
            seed,
            outputs,
            started: self.started,
            finished: now_rfc3339(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_seconds: self.started_at.elapsed().as_secs_f64(),
            failed_trials,
            total_trials,
            summary,
        })
    }
}

pub fn digest_of<C: Serialize>(config: &C) -> CmdResult<String> {
    let canonical = serde_json::to_vec(config)?;
    let hash = Sha256::digest(&canonical);
    Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Filename stamp: UTC compact timestamp unless overridden (tests pin it for
/// reproducible paths).
pub fn stamp(overridden: Option<&str>) -> String {
    match overridden {
        Some(s) => s.to_string(),
        None => chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string(),
    }
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> CmdResult {
    std::fs::write(path, serde_json::to_string_pretty(manifest)?)?;
    Ok(())
}
