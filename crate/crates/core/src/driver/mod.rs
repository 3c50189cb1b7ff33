//! Problem catalog, configuration, orchestration and the invariant suite.

pub mod check;
mod config;
mod run;
mod scenarios;

pub use config::{Heterogeneous, PbMode, ProblemConfig, Scenario};
pub use run::{append_csv, csv_row, format_g17, run, run_with_solution, sweep, Pipeline, RunReport, CSV_HEADER};
pub use scenarios::{channel_cells, checkerboard_white, coefficient_field, sinusoidal};
