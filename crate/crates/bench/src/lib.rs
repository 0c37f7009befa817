//! Benchmark driver for weak-form evaluation: parameter sweeps over forms,
//! orders, mesh sizes, modes, strategies and layouts, with mean-without-worst
//! timing, throughput and flop reports.

pub mod explain;
pub mod flops;
pub mod record;
pub mod report;
pub mod study;
pub mod sweep;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] einform::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, BenchError>;

pub use explain::explain_form;
pub use flops::{flops_per_cell, write_flops_csv, FlopsRow};
pub use record::RunRecord;
pub use report::{format_table, write_csv, CSV_HEADER, TIMING_COLUMNS};
pub use study::{run_study, StudyConfig};
pub use sweep::{layout_sweep, sweep_layouts};
