//! Simulation and verification toolkit for a two-species coarsening particle
//! system: an exact event-driven simulator of the underlying piecewise
//! deterministic Markov process, a deterministic bin discretization of the
//! limiting kinetic equations, an explicit renewal-series solver for those
//! equations, and an experiment harness that measures Kolmogorov-Smirnov
//! convergence and concentration behavior between the three.

pub mod error;
pub mod harness;
pub mod ic;
pub mod kinetic;
pub mod measures;
pub mod pdmp;
pub mod scheme;

pub use error::{Error, Result};
pub use ic::InitialCondition;
pub use kinetic::KineticSolution;
pub use measures::{
    bin_from_density, cumulative_eval, ks_distance, modulus_of_continuity, pair_distance, quantile,
    BinMeasure, Cdf, EmpiricalMeasure, GridDensity,
};
pub use pdmp::ParticleState;
pub use scheme::SchemeState;
