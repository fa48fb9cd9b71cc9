//! Parameter sweeps: scheme-vs-solution over delta and particle-vs-solution
//! Monte Carlo over n, plus per-parameter aggregation.

use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::kinetic::KineticSolution;
use crate::measures::{pair_distance, Cdf, GridDensity};
use crate::pdmp::{pdmp_run, ParticleState};
use crate::scheme::{scheme_init, scheme_run, snapshot_index};
use rayon::prelude::*;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Delta,
    N,
}

impl ParamKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParamKind::Delta => "delta",
            ParamKind::N => "n",
        }
    }
}

/// Distances against the explicit solution at one snapshot time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotDistance {
    pub t: f64,
    pub d1: f64,
    pub d2: f64,
    pub d: f64,
}

/// One sweep row: a single scheme run or PDMP replica.
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub experiment: &'static str,
    pub param_kind: ParamKind,
    pub param_value: f64,
    pub replica: u32,
    pub seed: u64,
    pub sup_distance: f64,
    pub per_snapshot: Vec<SnapshotDistance>,
    pub cemetery: bool,
    /// Wall-clock of the replica; informational only and excluded from the
    /// determinism contract.
    pub runtime_ms: u64,
}

impl ResultRecord {
    /// Equality modulo the wall-clock field.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.experiment == other.experiment
            && self.param_kind == other.param_kind
            && self.param_value == other.param_value
            && self.replica == other.replica
            && self.seed == other.seed
            && self.sup_distance.to_bits() == other.sup_distance.to_bits()
            && self.cemetery == other.cemetery
            && self.per_snapshot.len() == other.per_snapshot.len()
            && self
                .per_snapshot
                .iter()
                .zip(other.per_snapshot.iter())
                .all(|(a, b)| a.d.to_bits() == b.d.to_bits() && a.t.to_bits() == b.t.to_bits())
    }
}

/// Kinetic reference snapshots shared by every comparison in a sweep.
pub(crate) fn kinetic_snapshots(
    sol: &KineticSolution,
    times: &[f64],
) -> Result<Vec<(GridDensity, GridDensity)>> {
    times
        .iter()
        .map(|&t| Ok((sol.f1_eval(t)?, sol.f2_eval(t)?)))
        .collect()
}

/// Runs the discretization at every delta and records the sup-over-snapshots
/// pair distance to the explicit solution. Output rows are ordered by
/// ascending delta.
pub fn run_scheme_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let ic = cfg.initial_condition()?;
    let sol = cfg.solve_kinetic(&ic)?;
    let times = cfg.snapshot_times();
    let reference = kinetic_snapshots(&sol, &times)?;

    let mut deltas = cfg.delta_list.clone();
    deltas.sort_unstable_by(f64::total_cmp);

    let mut records = Vec::with_capacity(deltas.len());
    for &delta in &deltas {
        let started = Instant::now();
        let s0 = scheme_init(&ic, delta)?;
        let snapshots = scheme_run(&s0, cfg.t_end)?;
        let mut per_snapshot = Vec::with_capacity(times.len());
        let mut sup = 0.0f64;
        for (&t, (kin1, kin2)) in times.iter().zip(reference.iter()) {
            // Piecewise-constant-in-time convention for the scheme state.
            let s = &snapshots[snapshot_index(&snapshots, t)];
            let d1 = crate::measures::ks_distance(s.mu1(), kin1);
            let d2 = crate::measures::ks_distance(s.mu2(), kin2);
            let d = d1 + d2;
            sup = sup.max(d);
            per_snapshot.push(SnapshotDistance { t, d1, d2, d });
        }
        records.push(ResultRecord {
            experiment: "scheme",
            param_kind: ParamKind::Delta,
            param_value: delta,
            replica: 0,
            seed: cfg.master_seed,
            sup_distance: sup,
            per_snapshot,
            cemetery: false,
            runtime_ms: started.elapsed().as_millis() as u64,
        });
    }
    Ok(records)
}

/// RNG stream id for a replica: parameter index in the high bits, replica
/// index in the low bits.
fn replica_stream(param_index: usize, replica: u32) -> u64 {
    ((param_index as u64) << 32) | replica as u64
}

/// Simulates `replicas` independent particle systems per n and records the
/// sup-over-snapshots pair distance to the explicit solution. Replicas run
/// in parallel on the current rayon pool and are merged in replica order, so
/// worker count never changes the records.
pub fn run_pdmp_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let ic = cfg.initial_condition()?;
    let sol = cfg.solve_kinetic(&ic)?;
    let times = cfg.snapshot_times();
    let reference = kinetic_snapshots(&sol, &times)?;

    let mut n_values = cfg.n_list.clone();
    n_values.sort_unstable();

    let mut records = Vec::with_capacity(n_values.len() * cfg.replicas as usize);
    for (param_index, &n) in n_values.iter().enumerate() {
        let per_n: Vec<Result<ResultRecord>> = (0..cfg.replicas)
            .into_par_iter()
            .map(|replica| {
                let started = Instant::now();
                let stream = replica_stream(param_index, replica);
                let mut state = ParticleState::init(&ic, n, cfg.master_seed, stream)?;
                let out = pdmp_run(&mut state, cfg.t_end, &times)?;
                let mut per_snapshot = Vec::with_capacity(times.len());
                let mut sup = 0.0f64;
                for (&t, ((mu1, mu2), (kin1, kin2))) in
                    times.iter().zip(out.snapshots.iter().zip(reference.iter()))
                {
                    let d = pair_distance((mu1 as &dyn Cdf, mu2 as &dyn Cdf), (kin1, kin2));
                    let d1 = crate::measures::ks_distance(mu1, kin1);
                    per_snapshot.push(SnapshotDistance {
                        t,
                        d1,
                        d2: d - d1,
                        d,
                    });
                    sup = sup.max(d);
                }
                Ok(ResultRecord {
                    experiment: "pdmp",
                    param_kind: ParamKind::N,
                    param_value: n as f64,
                    replica,
                    seed: cfg.master_seed,
                    sup_distance: sup,
                    per_snapshot,
                    cemetery: out.cemetery,
                    runtime_ms: started.elapsed().as_millis() as u64,
                })
            })
            .collect();
        for r in per_n {
            records.push(r?);
        }
    }
    Ok(records)
}

/// Per-parameter summary over cemetery-free replicas.
#[derive(Debug, Clone)]
pub struct Aggregate {
    pub param_value: f64,
    pub used: usize,
    pub cemetery_count: usize,
    pub median_sup: f64,
    pub mean_sup: f64,
    /// `(eps, fraction of replicas with sup >= eps)` per requested eps.
    pub tail_fractions: Vec<(f64, f64)>,
}

/// Groups records by parameter value (in ascending order) and summarizes.
/// Cemetery replicas are counted but excluded from the statistics.
pub fn aggregate(records: &[ResultRecord], eps_list: &[f64]) -> Vec<Aggregate> {
    let mut params: Vec<f64> = records.iter().map(|r| r.param_value).collect();
    params.sort_unstable_by(f64::total_cmp);
    params.dedup();

    params
        .into_iter()
        .map(|p| {
            let group: Vec<&ResultRecord> = records.iter().filter(|r| r.param_value == p).collect();
            let cemetery_count = group.iter().filter(|r| r.cemetery).count();
            let mut sups: Vec<f64> = group
                .iter()
                .filter(|r| !r.cemetery)
                .map(|r| r.sup_distance)
                .collect();
            sups.sort_unstable_by(f64::total_cmp);
            let used = sups.len();
            let median_sup = match used {
                0 => f64::NAN,
                m if m % 2 == 1 => sups[m / 2],
                m => 0.5 * (sups[m / 2 - 1] + sups[m / 2]),
            };
            let mean_sup = if used == 0 {
                f64::NAN
            } else {
                sups.iter().sum::<f64>() / used as f64
            };
            let tail_fractions = eps_list
                .iter()
                .map(|&eps| {
                    let hits = sups.iter().filter(|s| **s >= eps).count();
                    (
                        eps,
                        if used == 0 {
                            f64::NAN
                        } else {
                            hits as f64 / used as f64
                        },
                    )
                })
                .collect();
            Aggregate {
                param_value: p,
                used,
                cemetery_count,
                median_sup,
                mean_sup,
                tail_fractions,
            }
        })
        .collect()
}
