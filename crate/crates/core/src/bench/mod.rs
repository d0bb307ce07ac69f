//! Benchmark scenarios and their CSV/JSON artifacts.
//!
//! Each scenario writes `summary.json` (sorted keys, `schema_version`) and
//! `series.csv` (one row per snapshot and run) into the output directory, plus
//! `field_<name>_<time>.csv` dumps when requested.

mod config;
mod output;
mod scenarios;

pub use config::{ConfigFile, GridPreset, Scenario, ScenarioConfig, Scheme};
pub use output::{
    emit_field_csv, field_file_name, format_number, read_field_csv, write_json, Table,
};
pub use scenarios::{
    pathwise_identity_residual, random_ensemble, run_scenario, ScenarioOutcome, DIAGNOSTIC_COLUMNS,
    SCHEMA_VERSION,
};
