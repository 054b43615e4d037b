//! Benchmark harness for the metadata cache: dataset generation, cold/warm
//! workload passes in the three cache modes, reports, and capacity stress.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod cputime;
pub mod gen;
pub mod micro;
pub mod report;
pub mod run;
pub mod stress;
pub mod workload;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("stale dataset: {0}")]
    StaleDataset(String),
    #[error("report error: {0}")]
    Report(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Format(#[from] stripecache::colfile::FormatError),
    #[error(transparent)]
    Scan(#[from] stripecache::scan::ScanError),
    #[error(transparent)]
    Cache(#[from] stripecache::metacache::CacheError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.to_owned(),
            source,
        }
    }
}
