//! Experiment orchestration: configuration, Monte-Carlo sweeps,
//! distance-over-time evaluation, aggregation, and CSV emission.

pub mod config;
pub mod output;
pub mod sweep;
pub mod validate;

pub use config::{load_config, parse_config, ExperimentConfig, IcName};
pub use output::{write_results, Manifest};
pub use sweep::{aggregate, run_pdmp_sweep, run_scheme_sweep, Aggregate, ParamKind, ResultRecord};
pub use validate::{run_validation, CheckResult};
