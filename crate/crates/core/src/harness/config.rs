//! Declarative experiment description, eager validation, and named initial
//! conditions.

use crate::error::{Error, Result};
use crate::ic::{self, InitialCondition};
use crate::kinetic::KineticSolution;
use crate::measures::GridDensity;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Series tolerance used for every solve driven by a config.
pub const SOLVER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcName {
    UniformHalves,
    Tent,
    CustomFile,
}

/// On-disk shape of a custom initial condition.
#[derive(Debug, Deserialize)]
struct CustomIcFile {
    step: f64,
    f1: Vec<f64>,
    f2: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ic_name: IcName,
    #[serde(default)]
    pub custom_ic_path: Option<PathBuf>,
    pub grid_step: f64,
    #[serde(default)]
    pub delta_list: Vec<f64>,
    #[serde(default)]
    pub n_list: Vec<usize>,
    #[serde(default = "default_replicas")]
    pub replicas: u32,
    pub master_seed: u64,
    pub t_end: f64,
    /// Snapshot count; when absent it is chosen so the snapshot spacing does
    /// not exceed the smallest delta (at least 32).
    #[serde(default)]
    pub snap_count: Option<usize>,
    #[serde(default)]
    pub eps_list: Vec<f64>,
    /// Species-2 floor for the kinetic horizon; defaults to 1e-3 * N2(0).
    #[serde(default)]
    pub n2_floor: Option<f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_replicas() -> u32 {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Builds the configured initial condition pair.
    pub fn initial_condition(&self) -> Result<InitialCondition> {
        match self.ic_name {
            IcName::UniformHalves => ic::uniform_halves(self.grid_step),
            IcName::Tent => ic::tent(self.grid_step),
            IcName::CustomFile => {
                let path = self.custom_ic_path.as_ref().ok_or_else(|| {
                    Error::Config("custom_ic_path is required for ic_name = custom_file".into())
                })?;
                load_custom_ic(path)
            }
        }
    }

    /// Effective snapshot count (see `snap_count`).
    pub fn effective_snap_count(&self) -> usize {
        if let Some(s) = self.snap_count {
            return s.max(2);
        }
        let base = 32usize;
        match self.min_delta() {
            Some(d) if d > 0.0 => base.max((self.t_end / d).ceil() as usize + 1),
            _ => base,
        }
    }

    pub fn min_delta(&self) -> Option<f64> {
        self.delta_list
            .iter()
            .cloned()
            .min_by(f64::total_cmp)
            .filter(|d| *d > 0.0)
    }

    /// Evenly spaced snapshot times over `[0, t_end]`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let s = self.effective_snap_count();
        (0..s)
            .map(|i| self.t_end * i as f64 / (s - 1) as f64)
            .collect()
    }

    /// Solves the kinetic equations for this config. The grid extends a
    /// little past `t_end` so an untruncated horizon certifies
    /// `t_end < T(f̄)`.
    pub fn solve_kinetic(&self, ic: &InitialCondition) -> Result<KineticSolution> {
        let margin = (0.05 * self.t_end).max(4.0 * self.grid_step);
        KineticSolution::solve(
            &ic.f1,
            &ic.f2,
            self.t_end + margin,
            SOLVER_TOL,
            self.n2_floor,
        )
    }

    /// Eager validation of every config invariant, with field names in the
    /// messages. Includes the kinetic-horizon check on `t_end`; experiments
    /// that never consume the kinetic reference (a bare simulation run) can
    /// use [`ExperimentConfig::validate_basic`] instead.
    pub fn validate(&self) -> Result<()> {
        self.validate_basic()?;
        let ic = self.initial_condition()?;
        let sol = self.solve_kinetic(&ic)?;
        if self.t_end >= sol.horizon() {
            return Err(Error::Config(format!(
                "t_end {} is at or beyond the kinetic horizon {} (N2 floor {})",
                self.t_end,
                sol.horizon(),
                sol.n2_floor()
            )));
        }
        Ok(())
    }

    /// All structural checks except the kinetic-horizon bound on `t_end`.
    pub fn validate_basic(&self) -> Result<()> {
        if !self.grid_step.is_finite() || self.grid_step <= 0.0 {
            return Err(Error::Config(format!(
                "grid_step must be positive, got {}",
                self.grid_step
            )));
        }
        if !self.t_end.is_finite() || self.t_end <= 0.0 {
            return Err(Error::Config(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.replicas < 1 {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        if let Some(n) = self.n_list.iter().find(|n| **n < 2) {
            return Err(Error::Config(format!(
                "n_list entries must be at least 2, got {n}"
            )));
        }
        if let Some(e) = self.eps_list.iter().find(|e| !e.is_finite() || **e <= 0.0) {
            return Err(Error::Config(format!(
                "eps_list entries must be positive, got {e}"
            )));
        }
        let ic = self.initial_condition()?;
        if (ic.step() - self.grid_step).abs() > 1e-12 * self.grid_step {
            return Err(Error::Config(format!(
                "custom_ic_path grid step {} must equal grid_step {}",
                ic.step(),
                self.grid_step
            )));
        }
        let support = ic.support_bound();
        for &d in &self.delta_list {
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::Config(format!(
                    "delta_list entries must be positive, got {d}"
                )));
            }
            let steps = d / self.grid_step;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                return Err(Error::Config(format!(
                    "delta_list entry {d} is not an integer multiple of grid_step {}",
                    self.grid_step
                )));
            }
            let bins = support / d;
            if (bins - bins.round()).abs() > 1e-9 * bins.max(1.0) {
                return Err(Error::Config(format!(
                    "delta_list entry {d} does not divide the support bound {support}"
                )));
            }
        }
        Ok(())
    }

    /// Canonical JSON used for the manifest hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

fn load_custom_ic(path: &Path) -> Result<InitialCondition> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: CustomIcFile = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let f1 = GridDensity::new(raw.step, raw.f1)?;
    let f2 = GridDensity::new(raw.step, raw.f2)?;
    InitialCondition::new(f1, f2)
}

/// Parses a config file without validating it; custom IC paths are resolved
/// relative to the config file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(match cfg.custom_ic_path {
        Some(p) if p.is_relative() => ExperimentConfig {
            custom_ic_path: Some(path.parent().map(|d| d.join(&p)).unwrap_or(p)),
            ..cfg
        },
        _ => cfg,
    })
}

/// Reads, parses, and fully validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let cfg = parse_config(path)?;
    cfg.validate()?;
    Ok(cfg)
}
