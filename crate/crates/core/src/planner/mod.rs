//! Scenario ingestion, parameter sweeps and output.

pub mod emit;
pub mod scenario;
pub mod sweep;

pub use emit::{csv_header, render, to_csv_string, to_report_string, write_csv, OutputFormat};
pub use scenario::{
    bundled_scenario, load_scenario, PopulationMode, Scenario, ScenarioError, SimSettings,
    SweepAxis, SweepParam, SweepValue, BUNDLED,
};
pub use sweep::{run_sweep, FailureKind, RowFailure, SweepError, SweepResult, SweepRow};
