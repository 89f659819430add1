//! Benchmark harness for the evidence estimators.
//!
//! The library side of the `bench_cli` binary: configuration parsing,
//! the replication runner, CSV emission and parsing, and summary tables.
//! Everything is deterministic given the experiment seed — replications run
//! in parallel but each draws from its own counter-derived RNG streams, so
//! the emitted CSV is byte-identical across runs and thread counts.

pub mod config;
pub mod csvio;
pub mod registry;
pub mod runner;
pub mod summary;

pub use config::{parse_config, ExperimentConfig, ModelSettings};
pub use runner::{diagnostic_report, run_experiment, RunRecord};
pub use summary::{render_summary, summarize, SummaryRow};

/// Failures surfaced by the harness, split by exit code: configuration
/// problems (including I/O) exit 1, numerical failures exit 2.
#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("numerical failure: {0}")]
    Numerical(#[from] evidence_core::Error),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Io(_) => 1,
            BenchError::Numerical(_) => 2,
        }
    }
}

pub type Result<T> = core::result::Result<T, BenchError>;
