//! Parameter sweeps over the feedback model: config parsing, built-in
//! scenarios, parallel evaluation and CSV/SVG output.

pub mod config;
pub mod plot;
pub mod presets;
pub mod scenario;
pub mod sweep;
pub mod table;

pub use config::{parse_config, preset, ConfigError};
pub use plot::{emit_svg, PlotError};
pub use scenario::{Kind, Model, Output, Scenario, Sweep, SweepVar};
pub use sweep::{run_sweep, Outcome, ResultRow, RunOptions};
pub use table::emit_csv;
