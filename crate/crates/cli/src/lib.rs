//! Front end for reproducible runs: configuration, dispatch and run
//! directories with a `report.json` index.

pub mod commands;
pub mod config;
pub mod output;

use anyhow::Result;
use sinegordon_core::Execution;

pub use config::{Command, RunConfig, Settings};
pub use output::Report;

/// Run `cfg` on `cfg.workers` threads (0 = all cores, 1 = sequential).
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let exec = if cfg.workers == 1 || !Execution::parallel_available() {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    #[cfg(feature = "parallel")]
    if cfg.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()?;
        return pool.install(|| commands::dispatch(cfg, exec));
    }
    commands::dispatch(cfg, exec)
}
