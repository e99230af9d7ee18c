//! Seeded batch experiments with CSV, JSON and SVG output.
//!
//! Each catalog entry reads an [`ExperimentConfig`], runs its replicas in
//! parallel with seeds derived from the master seed, and returns an
//! [`ExperimentReport`] whose checks are computed from the recorded numbers.

mod catalog;
mod config;
mod families;
mod render;
mod report;

pub use catalog::{
    catalog, describe, find, run_experiment, run_experiment_in, CatalogEntry, BEYOND_GRID,
};
pub use config::{ExperimentConfig, GraphonSource};
pub use families::{sparse_clique_size, FamilyKind, FamilyMember, GraphFamily};
pub use render::{to_csv, to_svg, write_report};
pub use report::{aggregate, median, Aggregate, Check, Environment, ExperimentReport, Record};
