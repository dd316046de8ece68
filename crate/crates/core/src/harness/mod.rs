//! Experiment harness: the symbol expression language, experiment
//! configuration, the four numerical experiments, and report output.

pub mod config;
pub mod experiments;
pub mod expr;
pub mod report;
