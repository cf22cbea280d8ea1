//! Experiment drivers behind the `cbm` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod sweep;

pub use sweep::{aggregate, alpha_grid, run_trials, write_csv, SweepRow, SweepSpec, TrialRecord};
