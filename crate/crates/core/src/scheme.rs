//! Deterministic bin discretization of the kinetic equations.
//!
//! State lives on origin-aligned bins of width `delta` and advances in time
//! steps of the same size. Each step reads the incremental loss (the first
//! species-1 bin), shifts species 1 one bin toward the origin, transfers a
//! proportional slice of species 2 into species 1, and rescales species 2.
//! The measures are piecewise constant in time between steps.

use crate::error::{Error, Result};
use crate::ic::InitialCondition;
use crate::measures::{bin_from_density, BinMeasure};
use std::io::Write;

/// Combined-mass normalization tolerance at initialization.
const MASS_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SchemeState {
    delta: f64,
    /// Step index; the state represents times `t in [k*delta, (k+1)*delta)`.
    k: usize,
    mu1: BinMeasure,
    mu2: BinMeasure,
    n2: f64,
    n1: f64,
    loss_history: Vec<f64>,
}

impl SchemeState {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn step_index(&self) -> usize {
        self.k
    }

    pub fn time(&self) -> f64 {
        self.k as f64 * self.delta
    }

    pub fn mu1(&self) -> &BinMeasure {
        &self.mu1
    }

    pub fn mu2(&self) -> &BinMeasure {
        &self.mu2
    }

    /// Species-2 total `Ñ2(t_k)`, maintained by exact subtraction of the
    /// incremental losses.
    pub fn n2(&self) -> f64 {
        self.n2
    }

    /// Conserved species-1 total `Ñ1`.
    pub fn n1(&self) -> f64 {
        self.n1
    }

    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }
}

/// Bins both initial densities on the `delta` grid. Requires the pair to be
/// normalized to combined mass 1 and `N2(0) > 0`, and `delta` to divide both
/// the grid step and the support bound.
pub fn scheme_init(ic: &InitialCondition, delta: f64) -> Result<SchemeState> {
    if (ic.total_mass() - 1.0).abs() > MASS_TOL {
        return Err(Error::Config(format!(
            "initial densities must have combined mass 1, got {}",
            ic.total_mass()
        )));
    }
    if ic.n2_zero() <= 0.0 {
        return Err(Error::Degenerate(
            "species 2 must carry positive initial mass".into(),
        ));
    }
    let support = ic.support_bound();
    let ratio = support / delta;
    if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::Config(format!(
            "delta {delta} must divide the support bound {support}"
        )));
    }
    let mu1 = bin_from_density(&ic.f1, delta)?;
    let mu2 = bin_from_density(&ic.f2, delta)?;
    let n2 = mu2.total_mass();
    let n1 = mu1.total_mass();
    Ok(SchemeState {
        delta,
        k: 0,
        mu1,
        mu2,
        n2,
        n1,
        loss_history: Vec::new(),
    })
}

/// One update `t_{k-1} -> t_k`: read the loss, shift species 1, transfer the
/// proportional species-2 slice, rescale species 2, decrement `Ñ2`.
pub fn scheme_step(s: &SchemeState) -> Result<SchemeState> {
    let loss = s.mu1.masses().first().copied().unwrap_or(0.0);
    if s.n2 - loss <= 0.0 {
        return Err(Error::HorizonExhausted {
            step: s.k + 1,
            n2: s.n2,
            loss,
        });
    }
    let frac = loss / s.n2;
    let m1 = s.mu1.masses();
    let m2 = s.mu2.masses();
    let n_bins = m1.len().max(m2.len());
    let mu1_next: Vec<f64> = (0..n_bins)
        .map(|l| {
            let shifted = m1.get(l + 1).copied().unwrap_or(0.0);
            shifted + frac * m2.get(l).copied().unwrap_or(0.0)
        })
        .collect();
    let mu2_next: Vec<f64> = m2.iter().map(|m| m * (1.0 - frac)).collect();

    let mut loss_history = s.loss_history.clone();
    loss_history.push(loss);
    Ok(SchemeState {
        delta: s.delta,
        k: s.k + 1,
        mu1: BinMeasure::new(s.delta, mu1_next)?,
        mu2: BinMeasure::new(s.delta, mu2_next)?,
        n2: s.n2 - loss,
        n1: s.n1,
        loss_history,
    })
}

/// Snapshots at every `t_k <= t_end`, starting with the initial state. The
/// measure at a non-grid time `t` is the snapshot at index `floor(t/delta)`.
pub fn scheme_run(s0: &SchemeState, t_end: f64) -> Result<Vec<SchemeState>> {
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::Domain(format!(
            "t_end must be nonnegative, got {t_end}"
        )));
    }
    let k_end = ((t_end / s0.delta) * (1.0 + 1e-12)).floor() as usize;
    let mut snapshots = Vec::with_capacity(k_end + 1 - s0.k);
    snapshots.push(s0.clone());
    let mut cur = s0.clone();
    while cur.k < k_end {
        cur = scheme_step(&cur)?;
        snapshots.push(cur.clone());
    }
    Ok(snapshots)
}

/// Index of the snapshot representing time `t` under the
/// piecewise-constant-in-time convention.
pub fn snapshot_index(snapshots: &[SchemeState], t: f64) -> usize {
    if snapshots.is_empty() {
        return 0;
    }
    let delta = snapshots[0].delta;
    let k = ((t / delta) * (1.0 + 1e-12)).floor() as usize;
    k.min(snapshots.len() - 1)
}

/// CSV export of a snapshot sequence: one row per (t_k, bin index).
pub fn write_snapshots_csv<W: Write>(snapshots: &[SchemeState], mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,bin,mu1,mu2,n2")?;
    for s in snapshots {
        let n_bins = s.mu1.n_bins().max(s.mu2.n_bins());
        for l in 0..n_bins {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.time(),
                l + 1,
                s.mu1.masses().get(l).copied().unwrap_or(0.0),
                s.mu2.masses().get(l).copied().unwrap_or(0.0),
                s.n2
            )?;
        }
    }
    Ok(())
}
