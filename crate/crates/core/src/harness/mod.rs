//! Experiment configuration, observers and the run driver behind the CLI.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod observers;
pub mod run;

pub use config::{Diagnostic, ExperimentConfig, FitWindows, InitConfig, Profile};
pub use run::{analyze, read_csv, run, write_csv, Manifest, RunOutcome, RunReport};
