//! Experiment configs, parameter sweeps, CSV tables and comparison reports.
//!
//! A config names an analysis kind, base parameters, a sweep variable with
//! its grid and optional series. [`run_analytic_sweep`] and
//! [`run_simulation_sweep`] turn it into a long-format [`SweepTable`]
//! (`sweep_var,value,metric,estimate,stderr,source`); [`compare`] matches two
//! tables row by row.

pub mod compare;
pub mod config;
pub mod figures;
pub mod sweep;
pub mod table;

use std::path::PathBuf;

pub use compare::{compare, ComparisonReport, ComparisonRow, Tolerance, TolerancePolicy};
pub use config::{parse_config, AnalysisKind, ExperimentConfig, Scenario, SimulationControls};
pub use figures::Figure;
pub use sweep::{run_analytic_sweep, run_simulation_sweep};
pub use table::{Estimate, Source, SweepRow, SweepTable, CSV_HEADER};

/// Environment variable holding the default output directory.
pub const OUTPUT_DIR_ENV: &str = "CELLTRAFFIC_OUT";

/// `$CELLTRAFFIC_OUT`, or `out` when unset.
pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}
