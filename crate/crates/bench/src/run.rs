//! Cold/warm passes and their CSV rows.

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use stripecache::colfile::ColumnType;
use stripecache::metacache::{open_store, Backend, CacheConfig, CacheStats, MetaCache, Policy};
use stripecache::scan::{
    Aggregate, CacheMode, FsStorage, Predicate, QueryOutput, ScanEngine, ScanResult,
};

use crate::cputime::process_cpu;
use crate::gen::{load_dataset, Dataset};
use crate::workload::Workload;
use crate::BenchError;

/// One CSV row: one pass of one scenario in one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scenario: String,
    pub mode: String,
    pub phase: String,
    pub run: u32,
    pub cpu_ms: f64,
    pub wall_ms: f64,
    pub hits: u64,
    pub misses: u64,
    pub puts: u64,
    pub evictions: u64,
    pub bytes_cached: u64,
    pub inflate_count: u64,
    pub deserialize_count: u64,
    pub encode_count: u64,
    pub decode_count: u64,
    pub rows_scanned: u64,
    pub stripes_skipped: u64,
}

pub const CSV_HEADER: &str = "scenario,mode,phase,run,cpu_ms,wall_ms,hits,misses,puts,evictions,bytes_cached,inflate_count,deserialize_count,encode_count,decode_count,rows_scanned,stripes_skipped";

impl BenchRow {
    pub fn new(scenario: &str, mode: CacheMode, phase: &str, run: u32, pass: &Pass) -> Self {
        let s = &pass.output.stats;
        BenchRow {
            scenario: scenario.to_owned(),
            mode: mode.to_string(),
            phase: phase.to_owned(),
            run,
            cpu_ms: pass.cpu_ms,
            wall_ms: pass.wall_ms,
            hits: s.hits,
            misses: s.misses,
            puts: s.puts,
            evictions: s.evictions,
            bytes_cached: s.bytes_cached,
            inflate_count: s.inflate_count,
            deserialize_count: s.deserialize_count,
            encode_count: s.encode_count,
            decode_count: s.decode_count,
            rows_scanned: pass.output.result.rows_scanned,
            stripes_skipped: pass.output.result.stripes_skipped,
        }
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits,
            misses: self.misses,
            puts: self.puts,
            evictions: self.evictions,
            bytes_cached: self.bytes_cached,
            inflate_count: self.inflate_count,
            deserialize_count: self.deserialize_count,
            encode_count: self.encode_count,
            decode_count: self.decode_count,
        }
    }
}

/// Appends rows, writing the header only when the file is new or empty.
pub fn append_csv(path: &Path, rows: &[BenchRow]) -> Result<(), BenchError> {
    let fresh = fs::metadata(path).map_or(true, |m| m.len() == 0);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| BenchError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<BenchRow>, BenchError> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<&str> = r.headers()?.iter().collect();
    if header.join(",") != CSV_HEADER {
        return Err(BenchError::Report(format!("{} does not have the bench CSV header", path.display())));
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone)]
pub struct Pass {
    pub output: QueryOutput,
    pub cpu_ms: f64,
    pub wall_ms: f64,
}

/// Runs one query pass, bracketing it with process CPU and wall clocks.
pub fn timed_pass(
    engine: &ScanEngine,
    files: &[PathBuf],
    pred: &Predicate,
    agg: Aggregate,
) -> Result<Pass, BenchError> {
    let (cpu0, wall0) = (process_cpu(), Instant::now());
    let output = engine.run_query(files, pred, agg)?;
    let (cpu1, wall1) = (process_cpu(), Instant::now());
    Ok(Pass {
        output,
        cpu_ms: (cpu1 - cpu0).as_secs_f64() * 1e3,
        wall_ms: (wall1 - wall0).as_secs_f64() * 1e3,
    })
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub workload: Workload,
    pub mode: CacheMode,
    pub capacity_bytes: u64,
    pub policy: Policy,
    pub reps: u32,
    pub workers: usize,
    /// Parent for a per-run directory cache; `None` keeps the cache in memory.
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rows: Vec<BenchRow>,
    /// Query result of every pass, cold first.
    pub results: Vec<ScanResult>,
}

/// A cache that is empty when handed out; directory-backed caches live in
/// a fresh subdirectory removed on drop.
pub(crate) struct FreshCache {
    pub cache: Arc<MetaCache>,
    dir: Option<PathBuf>,
}

impl FreshCache {
    pub fn open(capacity_bytes: u64, policy: Policy, parent: Option<&Path>) -> Result<Self, BenchError> {
        let dir = parent.map(|p| {
            let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos());
            p.join(format!("run-{}-{nanos}", std::process::id()))
        });
        let backend = dir.clone().map_or(Backend::Memory, Backend::DiskDir);
        let cache = open_store(CacheConfig {
            backend,
            capacity_bytes,
            policy,
        })?;
        Ok(FreshCache {
            cache: Arc::new(cache),
            dir,
        })
    }
}

impl Drop for FreshCache {
    fn drop(&mut self) {
        if let Some(dir) = &self.dir {
            if let Err(e) = fs::remove_dir_all(dir) {
                log::warn!("could not remove cache directory {}: {e}", dir.display());
            }
        }
    }
}

pub(crate) fn dataset_types(ds: &Dataset) -> Result<Vec<ColumnType>, BenchError> {
    ds.manifest.spec.validate()
}

/// One cold pass on a fresh cache, then `reps` warm passes on the same cache.
pub fn run_passes(ds: &Dataset, cfg: &RunConfig) -> Result<RunOutcome, BenchError> {
    if cfg.reps == 0 {
        return Err(BenchError::Usage("--reps must be at least 1".into()));
    }
    let (pred, agg) = cfg.workload.query(&dataset_types(ds)?)?;
    let fresh = FreshCache::open(cfg.capacity_bytes, cfg.policy, cfg.cache_dir.as_deref())?;
    let engine = ScanEngine::new(fresh.cache.clone(), cfg.mode, Arc::new(FsStorage)).with_workers(cfg.workers);
    let scenario = cfg.workload.to_string();

    let mut rows = Vec::new();
    let mut results = Vec::new();
    let cold = timed_pass(&engine, &ds.paths, &pred, agg)?;
    rows.push(BenchRow::new(&scenario, cfg.mode, "cold", 0, &cold));
    results.push(cold.output.result);
    for run in 0..cfg.reps {
        let warm = timed_pass(&engine, &ds.paths, &pred, agg)?;
        rows.push(BenchRow::new(&scenario, cfg.mode, "warm", run, &warm));
        results.push(warm.output.result);
    }
    log::info!("{scenario} {}: {}", cfg.mode, results[0].value);
    Ok(RunOutcome { rows, results })
}

pub fn cmd_run(data: &Path, cfg: &RunConfig, csv: &Path) -> Result<RunOutcome, BenchError> {
    let ds = load_dataset(data)?;
    let outcome = run_passes(&ds, cfg)?;
    append_csv(csv, &outcome.rows)?;
    Ok(outcome)
}
