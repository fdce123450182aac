//! Sweep configuration, orchestration across viscosities, report files and
//! the command-line front end.

pub mod cli;
mod config;
mod report;
mod sweep;

pub use config::{Engine, SweepConfig};
pub use report::{
    criteria_csv, criteria_grid_csv, emit_report, error_curve_name, load_manifest_config, rates_json, sweep_csv,
    SWEEP_HEADER,
};
pub use sweep::{resolve_jobs, run_point, run_sweep, run_sweep_with, PointResult, SweepPoint, SweepResult};
