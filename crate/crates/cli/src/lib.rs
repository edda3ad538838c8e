//! Batch driver for macflow: JSON configs, a problem library, refinement
//! studies and file output.

pub mod app;
pub mod config;
pub mod harness;
pub mod output;
pub mod problems;
