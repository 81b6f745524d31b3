//! Config-driven temperature sweeps for the `qbe-core` solver: TOML
//! configuration, a bounded worker pool, CSV/JSON outputs and trend checks.

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{ConfigError, RunConfig};
pub use sweep::{resolve_workers, run_sweep, Sweep, SweepError, SweepSummary};
