//! Experiment runner for `torus-density`: flat configuration files, a named
//! registry of experiments, and CSV / JSON / SVG report files.

pub mod config;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod registry;

pub use config::{ExperimentConfig, Format};
pub use emit::emit;
pub use error::{CliError, Result};
pub use experiments::standard_registry;
pub use registry::{Budget, Experiment, Registry};
