//! Scenario configuration, the benchmark presets, CSV logs and acceptance
//! reporting.

mod config;
mod csv;
mod presets;
mod report;

pub use self::config::{
    load_config, ConstraintSection, ControllerSection, ScenarioConfig, SimulationSection,
};
pub use self::csv::{csv_header, read_csv, write_csv, CsvLog};
pub use self::presets::{preset, PRESET_NAMES};
pub use self::report::{
    evaluate, measure_settling, run_scenario, Report, RestorationCheck, Settling,
};
