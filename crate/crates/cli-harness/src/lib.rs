//! Configuration-driven batch runner for the index pipelines and identity suites.

pub mod config;
pub mod report;
pub mod run;

pub use config::{load_config, ConfigError, Format, JobConfig, Method, TaskConfig};
pub use report::{emit_report, ReportRow, Rounded, CSV_HEADER};
pub use run::{run, run_task};

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "NCG_THREADS";

/// Sizes the global thread pool from [`THREADS_VAR`] when it holds a positive integer.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0) {
        // a pool that is already built keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
