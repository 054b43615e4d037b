//! Metadata-path microbenchmarks over in-memory files.
//!
//! Storage reads come from memory so the measured CPU is the metadata path
//! itself: section read, inflate, parse, cache lookup, encode or decode.
//! Timings use the calling thread's CPU clock and every engine runs with a
//! single worker on that thread.

use std::hint::black_box;
use std::path::PathBuf;
use std::sync::Arc;

use stripecache::colfile::{FooterAccess, StripeIndexAccess};
use stripecache::metacache::{CacheConfig, CacheStats, MetaCache, Policy};
use stripecache::scan::{CacheMode, MemStorage, ScanEngine};

use crate::cputime::thread_cpu;
use crate::gen::GenSpec;
use crate::BenchError;

pub struct MemDataset {
    pub storage: Arc<MemStorage>,
    pub paths: Vec<PathBuf>,
    pub stripes_per_file: usize,
}

pub fn mem_dataset(spec: &GenSpec) -> Result<MemDataset, BenchError> {
    let storage = Arc::new(MemStorage::new());
    let mut paths = Vec::with_capacity(spec.files);
    for i in 0..spec.files {
        let path = PathBuf::from(format!("/mem/{}", GenSpec::file_name(i)));
        storage.insert(&path, spec.generate_file(i)?.bytes);
        paths.push(path);
    }
    Ok(MemDataset {
        storage,
        paths,
        stripes_per_file: spec.stripes,
    })
}

fn engine(ds: &MemDataset, mode: CacheMode) -> Result<ScanEngine, BenchError> {
    let cache = MetaCache::open(CacheConfig::memory(u64::MAX, Policy::Lru))?;
    Ok(ScanEngine::new(Arc::new(cache), mode, ds.storage.clone()))
}

/// Reads the fields a split scan starts from.
fn touch(e: &ScanEngine, path: &std::path::Path, stripe: usize) -> Result<(), BenchError> {
    let h = e.open_file(path)?;
    let meta = e.load_stripe_metadata(&h, stripe)?;
    black_box(h.footer().stripe(stripe)?);
    black_box(meta.index.stripe_stats(0)?.null_count);
    black_box(meta.index.row_group(0, 0)?.byte_offset);
    Ok(())
}

/// One access = file footer + stripe footer + stripe index for one stripe.
fn access_pass(e: &ScanEngine, ds: &MemDataset) -> Result<u64, BenchError> {
    let mut n = 0;
    for path in &ds.paths {
        for s in 0..ds.stripes_per_file {
            touch(e, path, s)?;
            n += 1;
        }
    }
    Ok(n)
}

#[derive(Debug, Clone)]
pub struct WarmMeasurement {
    /// CPU ns per access for each timed pass, indexed like `CacheMode::ALL`.
    pub per_access_ns: [Vec<f64>; 3],
    pub accesses_per_pass: u64,
    /// Counter delta of the last timed pass per mode.
    pub last_pass_stats: [CacheStats; 3],
}

/// Populates one cache per mode, then times `passes` warm passes per mode,
/// rotating which mode goes first to spread drift evenly.
pub fn warm_read_costs(ds: &MemDataset, passes: usize) -> Result<WarmMeasurement, BenchError> {
    let engines = CacheMode::ALL.map(|m| engine(ds, m));
    let engines: Vec<ScanEngine> = engines.into_iter().collect::<Result<_, _>>()?;
    for e in &engines {
        access_pass(e, ds)?;
    }
    let mut out = WarmMeasurement {
        per_access_ns: Default::default(),
        accesses_per_pass: 0,
        last_pass_stats: Default::default(),
    };
    for p in 0..passes {
        for k in 0..3 {
            let m = (p + k) % 3;
            let e = &engines[m];
            let before = e.cache().stats_snapshot();
            let t0 = thread_cpu();
            let n = access_pass(e, ds)?;
            let dt = thread_cpu() - t0;
            out.last_pass_stats[m] = e.cache().stats_snapshot().delta_since(&before);
            out.accesses_per_pass = n;
            out.per_access_ns[m].push(dt.as_nanos() as f64 / n as f64);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ColdTrial {
    /// CPU ns of the cheapest cold pass per mode, indexed like `CacheMode::ALL`.
    pub pass_ns: [f64; 3],
    /// Counters of one cold pass per mode.
    pub stats: [CacheStats; 3],
}

/// Cold passes on fresh caches: each file's footer and every stripe's
/// metadata loaded once, so every cached-mode lookup misses. Each mode runs
/// `repeats` times, interleaved, and keeps its cheapest pass to damp
/// scheduler noise.
pub fn cold_write_trial(ds: &MemDataset, repeats: usize) -> Result<ColdTrial, BenchError> {
    let mut out = ColdTrial {
        pass_ns: [f64::INFINITY; 3],
        stats: Default::default(),
    };
    for r in 0..repeats.max(1) {
        for k in 0..3 {
            let m = (r + k) % 3;
            let e = engine(ds, CacheMode::ALL[m])?;
            let t0 = thread_cpu();
            for path in &ds.paths {
                let h = e.open_file(path)?;
                for s in 0..ds.stripes_per_file {
                    let meta = e.load_stripe_metadata(&h, s)?;
                    black_box(meta.index.stripe_stats(0)?.null_count);
                }
            }
            let ns = (thread_cpu() - t0).as_nanos() as f64;
            out.pass_ns[m] = out.pass_ns[m].min(ns);
            out.stats[m] = e.cache().stats_snapshot();
        }
    }
    Ok(out)
}
