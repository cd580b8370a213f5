//! Sweep driver for the relay HARQ models: config parsing, grid evaluation,
//! table output, plot presets and the invariant checker behind
//! `harq-lab verify`.

pub mod config;
pub mod output;
pub mod presets;
pub mod sweep;
pub mod verify;

pub use config::{ConfigError, SweepConfig};
pub use sweep::{run_sweep, Row};
pub use verify::{verify, Check};
