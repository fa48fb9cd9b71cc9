//! Canonical initial conditions for the two-species system.
//!
//! Both species are densities on `[0, 1]` with combined mass 1 and
//! `N_2(0) = 1/2`. `uniform_halves` has closed-form kinetics and is used by
//! the oracle tests; `tent` is Lipschitz and is used wherever convergence
//! rates are measured.

use crate::error::{Error, Result};
use crate::measures::GridDensity;

/// A pair of initial densities `(f1bar, f2bar)` on a shared grid.
#[derive(Debug, Clone)]
pub struct InitialCondition {
    pub f1: GridDensity,
    pub f2: GridDensity,
}

impl InitialCondition {
    pub fn new(f1: GridDensity, f2: GridDensity) -> Result<Self> {
        if f1.step() != f2.step() {
            return Err(Error::Config(format!(
                "initial densities must share a grid step, got {} and {}",
                f1.step(),
                f2.step()
            )));
        }
        Ok(Self { f1, f2 })
    }

    pub fn step(&self) -> f64 {
        self.f1.step()
    }

    /// Compact support bound of the pair.
    pub fn support_bound(&self) -> f64 {
        self.f1.support_bound().max(self.f2.support_bound())
    }

    pub fn total_mass(&self) -> f64 {
        self.f1.mass() + self.f2.mass()
    }

    pub fn n1_zero(&self) -> f64 {
        self.f1.mass()
    }

    pub fn n2_zero(&self) -> f64 {
        self.f2.mass()
    }
}

fn nodes_for_unit_interval(step: f64) -> Result<usize> {
    let ratio = 1.0 / step;
    let k = ratio.round();
    if !step.is_finite() || step <= 0.0 || (ratio - k).abs() > 1e-9 * ratio {
        return Err(Error::Config(format!(
            "grid step {step} must divide the unit support"
        )));
    }
    Ok(k as usize + 1)
}

/// `f1 = f2 = 1/2` on `[0, 1]`. Discontinuous at the support edge, so it is
/// reserved for closed-form checks rather than rate measurements.
pub fn uniform_halves(step: f64) -> Result<InitialCondition> {
    let n = nodes_for_unit_interval(step)?;
    let f = GridDensity::from_fn(step, n, |_| 0.5)?;
    InitialCondition::new(f.clone(), f)
}

/// `f1 = f2 = 2 min(x, 1-x)` on `[0, 1]`: Lipschitz tents with slope ±2 and
/// mass 1/2 each, so the pair carries combined mass 1.
pub fn tent(step: f64) -> Result<InitialCondition> {
    let n = nodes_for_unit_interval(step)?;
    let f = GridDensity::from_fn(step, n, |x| 2.0 * x.min(1.0 - x).max(0.0))?;
    InitialCondition::new(f.clone(), f)
}
