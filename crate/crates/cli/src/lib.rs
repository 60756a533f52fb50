//! Reproducible experiments over frkan heads: training runs with JSON
//! reports, grid-size ablations, Fourier truncation scans and synthetic
//! dataset generation.

pub mod args;
pub mod commands;

pub use args::{Cli, Command};
pub use commands::run;
