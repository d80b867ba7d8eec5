//! Presets, configuration files, scenario runs and figure data for the
//! `bounded-opinion` command.

pub mod analysis;
pub mod config;
pub mod plotdata;
pub mod presets;
pub mod scenario;

pub use config::{load_config, parse_config};
pub use plotdata::emit_plotdata;
pub use presets::{expand, Overrides, Plan, Preset};
pub use scenario::{rerun_manifest, run_config, run_scenario, RunManifest};
