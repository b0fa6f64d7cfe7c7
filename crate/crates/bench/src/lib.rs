//! Benchmark harness for the isospectral integrators: configuration, grid
//! runs, diagnostics, reports and trajectory files.

pub mod check;
pub mod config;
pub mod diagnostics;
pub mod grid;
pub mod ic;
pub mod report;
pub mod trajectory;

pub use config::{load_config, BenchConfig, ConfigError, ConfigOverrides, ModelKind};
pub use diagnostics::{diagnostics_report, DriftMetrics};
pub use grid::{run_cell, run_grid, run_grid_with, run_group, CellOutcome, RunRecord};
pub use report::{emit_csv, emit_markdown_table, markdown_table, read_csv};
pub use trajectory::{read_trajectory, write_trajectory, TrajectoryMetadata};
