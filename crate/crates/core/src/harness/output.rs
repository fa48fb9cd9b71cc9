//! CSV and manifest emission. Apart from the informational `runtime_ms`
//! column, output bytes are fully determined by `(config, master_seed)`.

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::sweep::ResultRecord;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub config_hash: String,
    pub code_version: String,
    pub master_seed: u64,
}

/// SHA-256 of the canonical config JSON.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(cfg.canonical_json().as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn write_all(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

/// Serializes records without the runtime column; used by the determinism
/// checks.
pub fn records_csv_stable(records: &[ResultRecord]) -> String {
    let mut out =
        String::from("experiment,param_kind,param_value,replica,seed,sup_distance,cemetery\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.experiment,
            r.param_kind.as_str(),
            r.param_value,
            r.replica,
            r.seed,
            r.sup_distance,
            r.cemetery as u8
        ));
    }
    out
}

fn records_csv(records: &[ResultRecord]) -> String {
    let mut out = String::from(
        "experiment,param_kind,param_value,replica,seed,sup_distance,cemetery,runtime_ms\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.experiment,
            r.param_kind.as_str(),
            r.param_value,
            r.replica,
            r.seed,
            r.sup_distance,
            r.cemetery as u8,
            r.runtime_ms
        ));
    }
    out
}

fn snapshots_csv(records: &[ResultRecord]) -> String {
    let mut out = String::from("experiment,param_value,replica,t,d1,d2,d\n");
    for r in records {
        for s in &r.per_snapshot {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.experiment, r.param_value, r.replica, s.t, s.d1, s.d2, s.d
            ));
        }
    }
    out
}

/// Writes `<experiment>_records.csv`, `<experiment>_snapshots.csv`, and
/// `manifest.json` under `out_dir`. Returns the written paths.
pub fn write_results(
    records: &[ResultRecord],
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let experiment = records.first().map(|r| r.experiment).unwrap_or("empty");

    let records_path = out_dir.join(format!("{experiment}_records.csv"));
    write_all(&records_path, records_csv(records).as_bytes())?;

    let snapshots_path = out_dir.join(format!("{experiment}_snapshots.csv"));
    write_all(&snapshots_path, snapshots_csv(records).as_bytes())?;

    let manifest = Manifest {
        config_hash: config_hash(cfg),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: cfg.master_seed,
    };
    let manifest_path = out_dir.join("manifest.json");
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_all(&manifest_path, manifest_json.as_bytes())?;

    Ok(vec![records_path, snapshots_path, manifest_path])
}
