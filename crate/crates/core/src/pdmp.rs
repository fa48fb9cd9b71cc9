//! Exact event-driven simulation of the n-particle piecewise deterministic
//! Markov process.
//!
//! Species-1 particles drift toward the origin at unit speed, so each one is
//! stored as its absolute arrival time at the origin; the min-heap over those
//! keys drives the event loop and drift costs nothing. Because drift speed is
//! one, the global drift offset and the elapsed time coincide and are kept in
//! a single clock. At an event every species-1 particle whose stored key
//! exactly equals the minimum is removed (quantile initialization can produce
//! exact ties), and for each removal one uniformly chosen species-2 particle
//! mutates in place. When a removal finds species 2 empty the process enters
//! its cemetery state and freezes.

use crate::error::{Error, Result};
use crate::ic::InitialCondition;
use crate::measures::{quantile, EmpiricalMeasure};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::Write;

/// Combined-mass normalization tolerance at initialization.
const MASS_TOL: f64 = 1e-8;

/// Total-ordered wrapper for finite nonnegative positions.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// One realized mutation: the species-2 particle at `position` changed label
/// at `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mutation {
    pub time: f64,
    pub position: f64,
}

#[derive(Debug, Clone)]
pub struct ParticleState {
    /// Elapsed time; equals the cumulative drift offset since speed is one.
    clock: f64,
    /// Species-1 origin-arrival times (stored position + insertion clock).
    s1: BinaryHeap<Reverse<Key>>,
    /// Species-2 positions; swap-remove keeps uniform deletion O(1).
    s2: Vec<f64>,
    n_initial: usize,
    /// One entry per removal, in event order.
    removal_times: Vec<f64>,
    /// One entry per realized mutation, in event order.
    mutation_log: Vec<Mutation>,
    cemetery: bool,
    rng: ChaCha8Rng,
}

impl ParticleState {
    /// Deterministic quantile placement: `floor(n*N1(0))` species-1 particles
    /// at the unnormalized-quantile levels `i/n`, the rest species-2 at
    /// levels `(i - floor(n*N1(0)))/n` in increasing order.
    pub fn init(ic: &InitialCondition, n: usize, master_seed: u64, stream: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("need at least 2 particles, got {n}")));
        }
        if (ic.total_mass() - 1.0).abs() > MASS_TOL {
            return Err(Error::Config(format!(
                "initial densities must have combined mass 1, got {}",
                ic.total_mass()
            )));
        }
        if ic.n2_zero() <= 0.0 {
            return Err(Error::Config(
                "species 2 must carry positive initial mass".into(),
            ));
        }
        let nf = n as f64;
        let target = nf * ic.n1_zero();
        // Snap to the nearest integer when the product is integral up to
        // accumulated quadrature rounding.
        let n1_count = if (target - target.round()).abs() < 1e-6 {
            target.round() as usize
        } else {
            target.floor() as usize
        };
        if n1_count >= n {
            return Err(Error::Config(
                "quantile placement leaves species 2 empty".into(),
            ));
        }

        let mut s1_pos = Vec::with_capacity(n1_count);
        for i in 1..=n1_count {
            s1_pos.push(quantile(&ic.f1, (i as f64 / nf).min(ic.n1_zero()))?);
        }
        let mass2 = ic.n2_zero();
        let mut s2 = Vec::with_capacity(n - n1_count);
        for i in (n1_count + 1)..=n {
            let level = (i - n1_count) as f64 / nf;
            s2.push(quantile(&ic.f2, level.min(mass2))?);
        }
        Ok(Self::from_positions(s1_pos, s2, n, master_seed, stream))
    }

    /// Builds a state from explicit particle positions. `n_initial` fixes the
    /// `1/n` weight of the emitted empirical measures.
    pub fn from_positions(
        s1_positions: Vec<f64>,
        s2_positions: Vec<f64>,
        n_initial: usize,
        master_seed: u64,
        stream: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream);
        let s1 = s1_positions.into_iter().map(|p| Reverse(Key(p))).collect();
        Self {
            clock: 0.0,
            s1,
            s2: s2_positions,
            n_initial,
            removal_times: Vec::new(),
            mutation_log: Vec::new(),
            cemetery: false,
            rng,
        }
    }

    pub fn time(&self) -> f64 {
        self.clock
    }

    pub fn n_initial(&self) -> usize {
        self.n_initial
    }

    pub fn s1_len(&self) -> usize {
        self.s1.len()
    }

    pub fn s2_len(&self) -> usize {
        self.s2.len()
    }

    pub fn is_cemetery(&self) -> bool {
        self.cemetery
    }

    pub fn removal_count(&self) -> usize {
        self.removal_times.len()
    }

    pub fn removal_times(&self) -> &[f64] {
        &self.removal_times
    }

    pub fn mutation_log(&self) -> &[Mutation] {
        &self.mutation_log
    }

    /// Current species-1 positions (unordered).
    pub fn s1_positions(&self) -> Vec<f64> {
        self.s1.iter().map(|Reverse(k)| k.0 - self.clock).collect()
    }

    pub fn s2_positions(&self) -> &[f64] {
        &self.s2
    }

    /// Time until the next removal: the minimum effective species-1 position.
    /// `None` once species 1 is empty or the cemetery state was reached.
    pub fn next_event(&self) -> Option<f64> {
        if self.cemetery {
            return None;
        }
        self.s1.peek().map(|Reverse(k)| k.0 - self.clock)
    }

    /// Advances to the next event and applies it: removes every species-1
    /// particle tied at the minimum, then mutates one uniformly drawn
    /// species-2 particle per removal (sampling without replacement across a
    /// tie batch). No-op in the cemetery state or when species 1 is empty.
    pub fn apply_event(&mut self) {
        if self.cemetery {
            return;
        }
        let Some(&Reverse(min_key)) = self.s1.peek() else {
            return;
        };
        self.clock = min_key.0;
        let mut batch = 0usize;
        while self.s1.peek() == Some(&Reverse(min_key)) {
            self.s1.pop();
            batch += 1;
        }
        for _ in 0..batch {
            self.removal_times.push(self.clock);
            if self.s2.is_empty() {
                self.cemetery = true;
                return;
            }
            let idx = self.rng.random_range(0..self.s2.len());
            let position = self.s2.swap_remove(idx);
            self.s1.push(Reverse(Key(position + self.clock)));
            self.mutation_log.push(Mutation {
                time: self.clock,
                position,
            });
        }
    }

    /// Applies every event with time `<= t` (a removal exactly at `t` is
    /// applied before sampling).
    pub fn advance_to(&mut self, t: f64) {
        while let Some(tau) = self.next_event() {
            if self.clock + tau > t {
                break;
            }
            self.apply_event();
        }
    }

    /// Normalized loss `L^n(t) = removals(t) / n`. Requires `t` at or before
    /// the current clock.
    pub fn loss_count(&self, t: f64) -> Result<f64> {
        if t > self.clock && self.next_event().is_some_and(|tau| self.clock + tau <= t) {
            return Err(Error::Domain(format!(
                "loss requested at {t} with unapplied events before it"
            )));
        }
        let k = self.removal_times.partition_point(|r| *r <= t);
        Ok(k as f64 / self.n_initial as f64)
    }

    /// Empirical pair `(μ1, μ2)` at time `t >= clock`, weights `1/n`. All
    /// events up to `t` must already be applied; after the cemetery the state
    /// is frozen at its terminal clock.
    pub fn empirical_at(&self, t: f64) -> Result<(EmpiricalMeasure, EmpiricalMeasure)> {
        if !self.cemetery {
            if t < self.clock {
                return Err(Error::Domain(format!(
                    "snapshot at {t} lies before the current time {}",
                    self.clock
                )));
            }
            if let Some(tau) = self.next_event() {
                if self.clock + tau <= t {
                    return Err(Error::Domain(format!(
                        "snapshot at {t} has an unapplied event at {}",
                        self.clock + tau
                    )));
                }
            }
        }
        let drift_to = if self.cemetery { self.clock } else { t };
        let w = 1.0 / self.n_initial as f64;
        let s1_pts: Vec<f64> = self
            .s1
            .iter()
            .map(|Reverse(k)| (k.0 - drift_to).max(0.0))
            .collect();
        let mu1 = EmpiricalMeasure::new(s1_pts, w)?;
        let mu2 = EmpiricalMeasure::new(self.s2.clone(), w)?;
        Ok((mu1, mu2))
    }
}

/// Snapshot sequence from a PDMP run.
#[derive(Debug)]
pub struct RunOutput {
    pub snapshots: Vec<(EmpiricalMeasure, EmpiricalMeasure)>,
    /// Set when the cemetery state was reached before the last snapshot;
    /// remaining snapshots are emitted from the frozen terminal state.
    pub cemetery: bool,
}

/// Runs the state forward, emitting the empirical pair at each requested
/// time. `snap_times` must be sorted and bounded by `t_end`.
pub fn pdmp_run(state: &mut ParticleState, t_end: f64, snap_times: &[f64]) -> Result<RunOutput> {
    if snap_times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("snapshot times must be sorted".into()));
    }
    if let Some(&last) = snap_times.last() {
        if last > t_end * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "snapshot time {last} exceeds t_end {t_end}"
            )));
        }
    }
    let mut snapshots = Vec::with_capacity(snap_times.len());
    for &t in snap_times {
        state.advance_to(t);
        snapshots.push(state.empirical_at(t)?);
    }
    state.advance_to(t_end);
    Ok(RunOutput {
        snapshots,
        cemetery: state.is_cemetery(),
    })
}

/// Event-log dump: one row per realized mutation, bit-exact for equal seeds.
pub fn write_event_log<W: Write>(state: &ParticleState, mut w: W) -> std::io::Result<()> {
    writeln!(w, "event,time,position")?;
    for (i, m) in state.mutation_log().iter().enumerate() {
        writeln!(w, "{},{},{}", i + 1, m.time, m.position)?;
    }
    Ok(())
}
