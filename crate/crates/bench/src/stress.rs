//! Warm passes under a cache budget below the metadata working set.

use std::path::Path;
use std::sync::Arc;

use stripecache::metacache::{Policy, TraceEvent};
use stripecache::scan::{CacheMode, FsStorage, ScanEngine};

use crate::gen::{load_dataset, Dataset};
use crate::run::{append_csv, dataset_types, timed_pass, BenchRow, FreshCache};
use crate::workload::Workload;
use crate::BenchError;

#[derive(Debug, Clone)]
pub struct StressConfig {
    pub workload: Workload,
    pub mode: CacheMode,
    pub capacity_bytes: u64,
    pub policy: Policy,
    pub reps: u32,
    pub workers: usize,
}

#[derive(Debug, Clone)]
pub struct StressOutcome {
    pub rows: Vec<BenchRow>,
    /// Bytes cached after one pass with an unbounded cache.
    pub working_set: u64,
    /// Every cache operation of the measured passes, in order.
    pub trace: Vec<TraceEvent>,
    pub hits: u64,
    pub misses: u64,
    pub evictions: u64,
}

impl StressOutcome {
    pub fn hit_rate(&self) -> f64 {
        let n = self.hits + self.misses;
        if n == 0 {
            0.0
        } else {
            self.hits as f64 / n as f64
        }
    }
}

/// Sizes the working set with a dry pass, then runs a cold pass and `reps`
/// warm passes at `capacity_bytes` with tracing on.
pub fn stress_passes(ds: &Dataset, cfg: &StressConfig) -> Result<StressOutcome, BenchError> {
    if cfg.mode == CacheMode::None {
        return Err(BenchError::Usage("stress needs a caching mode (bytes or objects)".into()));
    }
    if cfg.reps == 0 {
        return Err(BenchError::Usage("--reps must be at least 1".into()));
    }
    let (pred, agg) = cfg.workload.query(&dataset_types(ds)?)?;
    let storage = Arc::new(FsStorage);

    let dry = FreshCache::open(u64::MAX, cfg.policy, None)?;
    let dry_engine = ScanEngine::new(dry.cache.clone(), cfg.mode, storage.clone()).with_workers(cfg.workers);
    dry_engine.run_query(&ds.paths, &pred, agg)?;
    let working_set = dry.cache.stats_snapshot().bytes_cached;
    if cfg.capacity_bytes >= working_set {
        log::warn!(
            "capacity {} B holds the whole {working_set} B working set; no thrashing expected",
            cfg.capacity_bytes
        );
    }

    let fresh = FreshCache::open(cfg.capacity_bytes, cfg.policy, None)?;
    fresh.cache.enable_trace();
    let engine = ScanEngine::new(fresh.cache.clone(), cfg.mode, storage).with_workers(cfg.workers);
    let scenario = format!("stress-{}-{}", cfg.workload, cfg.capacity_bytes);
    let mut rows = Vec::new();
    let cold = timed_pass(&engine, &ds.paths, &pred, agg)?;
    rows.push(BenchRow::new(&scenario, cfg.mode, "cold", 0, &cold));
    let (mut hits, mut misses, mut evictions) = (0, 0, 0);
    for run in 0..cfg.reps {
        let warm = timed_pass(&engine, &ds.paths, &pred, agg)?;
        let s = &warm.output.stats;
        hits += s.hits;
        misses += s.misses;
        evictions += s.evictions;
        rows.push(BenchRow::new(&scenario, cfg.mode, "warm", run, &warm));
    }
    Ok(StressOutcome {
        rows,
        working_set,
        trace: fresh.cache.take_trace(),
        hits,
        misses,
        evictions,
    })
}

pub fn cmd_stress(data: &Path, cfg: &StressConfig, csv: &Path) -> Result<StressOutcome, BenchError> {
    let ds = load_dataset(data)?;
    let outcome = stress_passes(&ds, cfg)?;
    append_csv(csv, &outcome.rows)?;
    Ok(outcome)
}
