//! Acceptance gate: one pass/fail line per criterion, non-zero exit on any
//! failure. Criteria assert with panics; each runs under `catch_unwind`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::sim::Sim;
use common::{random_table, random_value, RandomTable, Rng};
use sha2::{Digest, Sha256};
use stripecache::colfile::*;
use stripecache::metacache::*;
use stripecache::scan::*;
use stripecache_bench::gen::{cmd_gen, load_dataset, splitmix64, GenSpec};
use stripecache_bench::micro::{cold_write_trial, mem_dataset, warm_read_costs};
use stripecache_bench::report::median;
use stripecache_bench::run::{run_passes, RunConfig};
use stripecache_bench::workload::Workload;

const POLICIES: [Policy; 3] = [Policy::Fifo, Policy::Lru, Policy::Lfu];

fn engine(mode: CacheMode, storage: &Arc<MemStorage>) -> ScanEngine {
    let cache = MetaCache::open(CacheConfig::memory(1 << 32, Policy::Lru)).unwrap();
    ScanEngine::new(Arc::new(cache), mode, storage.clone())
}

fn mem_tables(tables: &[RandomTable]) -> (Arc<MemStorage>, Vec<PathBuf>, Vec<Vec<u8>>) {
    let storage = Arc::new(MemStorage::new());
    let mut paths = Vec::new();
    let mut files = Vec::new();
    for (i, t) in tables.iter().enumerate() {
        let path = PathBuf::from(format!("/mem/t{i}.ocf"));
        let bytes = write_file(&t.schema, &t.rows, t.stripe_rows).unwrap().bytes;
        storage.insert(&path, bytes.clone());
        paths.push(path);
        files.push(bytes);
    }
    (storage, paths, files)
}

fn random_literal(rng: &mut Rng, t: &RandomTable, col: usize) -> Value {
    // mostly stored values so range boundaries get exercised
    if rng.chance(70) {
        for _ in 0..4 {
            let r = rng.below(t.rows.len() as u64) as usize;
            if let Some(v) = &t.rows[r][col] {
                return v.clone();
            }
        }
    }
    random_value(rng, t.schema[col].ty, 0).unwrap()
}

fn random_query(rng: &mut Rng, t: &RandomTable) -> (Predicate, Aggregate) {
    let ncols = t.schema.len() as u64;
    let atoms = (0..rng.below(4))
        .map(|_| {
            let col = rng.below(ncols) as usize;
            Atom::new(col, CmpOp::ALL[rng.below(6) as usize], random_literal(rng, t, col))
        })
        .collect();
    let col = rng.below(ncols) as usize;
    let agg = match rng.below(4) {
        0 => Aggregate::Count,
        1 if t.schema[col].ty.is_numeric() => Aggregate::Sum(col),
        1 | 2 => Aggregate::Min(col),
        _ => Aggregate::Max(col),
    };
    (Predicate::new(atoms), agg)
}

fn row_matches(pred: &Predicate, row: &Row) -> bool {
    pred.atoms.iter().all(|a| match &row[a.column] {
        None => false,
        Some(v) => match (a.op, v.as_ref().compare(&a.literal.as_ref())) {
            (CmpOp::Ne, None) => true,
            (_, None) => false,
            (CmpOp::Lt, Some(o)) => o.is_lt(),
            (CmpOp::Le, Some(o)) => o.is_le(),
            (CmpOp::Eq, Some(o)) => o.is_eq(),
            (CmpOp::Ge, Some(o)) => o.is_ge(),
            (CmpOp::Gt, Some(o)) => o.is_gt(),
            (CmpOp::Ne, Some(o)) => o.is_ne(),
        },
    })
}

/// Row-by-row scan with no statistics at all; partial aggregates fold per
/// stripe, then across stripes, matching the engine's float summation order.
fn no_pushdown_oracle(t: &RandomTable, pred: &Predicate, agg: Aggregate) -> (AggValue, u64) {
    let types: Vec<_> = t.schema.iter().map(|c| c.ty).collect();
    let mut total = AggValue::initial(agg, &types);
    let mut matched = 0;
    for stripe in t.rows.chunks(t.stripe_rows) {
        let mut part = AggValue::initial(agg, &types);
        for row in stripe.iter().filter(|r| row_matches(pred, r)) {
            matched += 1;
            let v = agg.column().and_then(|c| row[c].as_ref());
            match (&mut part, v) {
                (AggValue::Count(n), _) => *n += 1,
                (AggValue::SumInt(s), Some(Value::Int64(x))) => *s += *x as i128,
                (AggValue::SumFloat(s), Some(Value::Float64(x))) => *s += *x,
                (AggValue::Min(cur), Some(v)) | (AggValue::Max(cur), Some(v)) => {
                    let want = if matches!(agg, Aggregate::Min(_)) {
                        std::cmp::Ordering::Less
                    } else {
                        std::cmp::Ordering::Greater
                    };
                    let nan = matches!(v, Value::Float64(x) if x.is_nan());
                    let better = cur.as_ref().is_none_or(|c| v.as_ref().compare(&c.as_ref()) == Some(want));
                    if !nan && better {
                        *cur = Some(v.clone());
                    }
                }
                _ => {}
            }
        }
        total.merge(&part);
    }
    (total, matched)
}

fn correctness_oracle() -> String {
    const FILES: u64 = 1000;
    let tables: Vec<_> = (0..FILES).map(|s| random_table(0xacce_0000 + s, 6, 2600)).collect();
    let (storage, paths, files) = mem_tables(&tables);
    let engines = CacheMode::ALL.map(|m| engine(m, &storage));
    let mut sections = 0u64;
    for (bytes, path) in files.iter().zip(&paths) {
        let direct = read_footer(bytes.as_slice()).unwrap();
        for e in &engines[1..] {
            // first pass fills the cache, second is served from it
            for pass in 0..2 {
                let h = e.open_file(path).unwrap();
                assert_eq!(h.footer().is_view(), e.mode() == CacheMode::Objects && pass == 1);
                assert_eq!(h.footer().to_footer().unwrap(), direct, "{} {}", e.mode(), path.display());
                for s in 0..direct.stripes.len() {
                    let m = e.load_stripe_metadata(&h, s).unwrap();
                    assert_eq!(m.footer.to_stripe_footer().unwrap(), read_stripe_footer(bytes.as_slice(), &direct, s).unwrap());
                    assert_eq!(m.index.to_stripe_index().unwrap(), read_stripe_index(bytes.as_slice(), &direct, s).unwrap());
                    sections += 2;
                }
                sections += 1;
            }
        }
    }
    let mut rng = Rng::new(0x5eed);
    let mut queries = 0;
    for (t, path) in tables.iter().zip(&paths) {
        for _ in 0..2 {
            let (pred, agg) = random_query(&mut rng, t);
            let results: Vec<_> = engines
                .iter()
                .map(|e| e.run_query(std::slice::from_ref(path), &pred, agg).unwrap().result)
                .collect();
            assert!(results.iter().all(|r| r == &results[0]), "{pred} {agg}: {results:?}");
            queries += 1;
        }
    }
    format!("{FILES} files, {sections} cached section loads equal direct parses, {queries} queries identical in 3 modes")
}

fn bench_dataset(dir: &std::path::Path) -> stripecache_bench::gen::Dataset {
    let spec = GenSpec {
        seed: 11,
        files: 8,
        stripes: 3,
        rows: 2500,
        cols: "iifs".into(),
    };
    cmd_gen(&spec, dir).unwrap();
    load_dataset(dir).unwrap()
}

fn warm_counters() -> String {
    let dir = tempfile::tempdir().unwrap();
    let ds = bench_dataset(&dir.path().join("data"));
    let mut checked = 0;
    for w in Workload::ALL {
        let mut results = Vec::new();
        for mode in CacheMode::ALL {
            let cfg = RunConfig {
                workload: w,
                mode,
                capacity_bytes: 1 << 30,
                policy: Policy::Lru,
                reps: 2,
                workers: 4,
                cache_dir: None,
            };
            let out = run_passes(&ds, &cfg).unwrap();
            for r in out.rows.iter().filter(|r| r.phase == "warm") {
                match mode {
                    CacheMode::None => {
                        assert_eq!(r.stats(), out.rows[0].stats(), "{w} none: warm differs from cold")
                    }
                    CacheMode::Bytes => assert_eq!(r.inflate_count, 0, "{w} bytes warm inflate"),
                    CacheMode::Objects => {
                        assert_eq!((r.inflate_count, r.deserialize_count), (0, 0), "{w} objects warm")
                    }
                }
                checked += 1;
            }
            results.push(out.results);
        }
        assert!(results.iter().all(|r| r == &results[0]), "{w}: results differ across modes");
    }
    format!("{checked} warm passes: inflate 0 (bytes, objects), deserialize 0 (objects)")
}

fn dense_spec() -> GenSpec {
    GenSpec {
        seed: 7,
        files: 100,
        stripes: 4,
        rows: 4096,
        cols: "iifs".into(),
    }
}

fn warm_cpu_ordering() -> String {
    let ds = mem_dataset(&dense_spec()).unwrap();
    let w = warm_read_costs(&ds, 25).unwrap();
    let total = w.accesses_per_pass * w.per_access_ns[0].len() as u64;
    assert!(total >= 10_000, "only {total} accesses per mode");
    let [none, bytes, objects] = w.per_access_ns.clone().map(|mut v| median(&mut v).unwrap());
    let s = &w.last_pass_stats;
    assert_eq!((s[1].misses, s[2].misses), (0, 0), "metadata not fully resident");
    let line = format!(
        "median ns/access none {none:.0}, bytes {bytes:.0} ({:.2}x), objects {objects:.0} ({:.2}x) over {total} accesses/mode",
        bytes / none,
        objects / none
    );
    assert!(objects < bytes && bytes < none, "{line}: ordering");
    assert!(objects <= 0.5 * none, "{line}: objects above 0.5x none");
    assert!(bytes <= 0.9 * none, "{line}: bytes above 0.9x none");
    line
}

fn cold_overhead_ordering() -> String {
    let ds = mem_dataset(&dense_spec()).unwrap();
    let trials: Vec<_> = (0..5).map(|_| cold_write_trial(&ds, 3).unwrap()).collect();
    let inversions = trials
        .iter()
        .filter(|t| !(t.pass_ns[0] <= t.pass_ns[1] && t.pass_ns[1] <= t.pass_ns[2]))
        .count();
    let [none, bytes, objects] =
        [0, 1, 2].map(|m| median(&mut trials.iter().map(|t| t.pass_ns[m]).collect::<Vec<_>>()).unwrap());
    for t in &trials {
        let [n, b, o] = &t.stats;
        assert_eq!((n.encode_count, b.encode_count), (0, 0), "only objects may encode");
        assert_eq!(o.encode_count, o.puts, "objects encodes once per stored section");
        assert!(o.encode_count > 0);
        assert_eq!(
            [n.inflate_count, n.deserialize_count],
            [b.inflate_count, b.deserialize_count],
            "bytes does the same storage work as none"
        );
        assert_eq!([b.inflate_count, b.deserialize_count], [o.inflate_count, o.deserialize_count]);
    }
    let line = format!(
        "median cold ms none {:.2}, bytes {:.2} ({:+.1}%), objects {:.2} ({:+.1}%), {inversions}/5 trials inverted, objects encodes {}",
        none / 1e6,
        bytes / 1e6,
        (bytes - none) / none * 100.0,
        objects / 1e6,
        (objects - none) / none * 100.0,
        trials[0].stats[2].encode_count
    );
    assert!(none <= bytes && bytes <= objects, "{line}: median ordering");
    assert!(inversions <= 1, "{line}: too many inverted trials");
    line
}

fn key_universe(n: u64) -> Vec<CacheKey> {
    (0..n)
        .map(|i| match i % 3 {
            0 => CacheKey::footer(i / 3),
            1 => CacheKey::stripe_footer(i / 3, (i % 7) as u32),
            _ => CacheKey::stripe_index(i / 3, (i % 5) as u32),
        })
        .collect()
}

/// Drives a cache and the brute-force simulator in lockstep.
struct Lockstep {
    cache: MetaCache,
    sim: Sim,
    payloads: HashMap<CacheKey, Vec<u8>>,
}

impl Lockstep {
    fn new(cache: MetaCache, policy: Policy) -> Self {
        let sim = Sim::new(cache.capacity(), policy);
        Lockstep {
            cache,
            sim,
            payloads: HashMap::new(),
        }
    }

    fn step(&mut self, rng: &mut Rng, keys: &[CacheKey]) {
        let key = keys[rng.below(keys.len() as u64) as usize];
        let cap = self.cache.capacity();
        if rng.chance(45) {
            let size = match rng.below(50) {
                0 => cap + 1,
                _ => 1 + rng.below(cap / 4),
            };
            let bytes: Vec<u8> = (0..size).map(|_| rng.next() as u8).collect();
            let got = self.cache.put(key, CacheValue::raw(bytes.clone()));
            match self.sim.put(key, size) {
                None => assert!(matches!(got, Err(CacheError::Oversize { .. }))),
                Some(evicted) => {
                    assert_eq!(got.unwrap(), evicted, "evictions on put {key}");
                    self.payloads.insert(key, bytes);
                }
            }
        } else {
            let got = self.cache.get(&key).unwrap();
            assert_eq!(got.is_some(), self.sim.get(key), "hit/miss for {key}");
            if let Some(v) = got {
                assert_eq!(&v.payload[..], &self.payloads[&key][..]);
            }
        }
        assert_eq!(self.cache.resident_keys(), self.sim.resident());
        assert_eq!(self.cache.stats_snapshot().bytes_cached, self.sim.bytes());
    }
}

fn eviction_oracle() -> String {
    let mut evictions = 0;
    for policy in POLICIES {
        for (seed, cap, universe) in [(21, 1000, 40), (22, 4000, 150)] {
            let cache = MetaCache::open(CacheConfig::memory(cap, policy)).unwrap();
            let mut l = Lockstep::new(cache, policy);
            let keys = key_universe(universe);
            let mut rng = Rng::new(seed);
            for _ in 0..10_000 {
                l.step(&mut rng, &keys);
            }
            assert_eq!(l.cache.stats_snapshot().evictions, l.sim.evictions);
            evictions += l.sim.evictions;
        }
    }
    format!("6 traces x 10^4 steps (fifo, lru, lfu): resident sets equal after every step, {evictions} evictions")
}

fn persistence() -> String {
    let mut reloaded = 0;
    for policy in POLICIES {
        let dir = tempfile::tempdir().unwrap();
        let config = |cap| CacheConfig {
            backend: Backend::DiskDir(dir.path().join("store")),
            capacity_bytes: cap,
            policy,
        };
        let keys = key_universe(60);
        let mut rng = Rng::new(600);
        let mut l = Lockstep::new(open_store(config(3000)).unwrap(), policy);
        for _ in 0..3000 {
            l.step(&mut rng, &keys);
        }
        let Lockstep { cache, mut sim, payloads } = l;
        let resident = cache.resident_keys();
        drop(cache);

        let cache = open_store(config(3000)).unwrap();
        assert_eq!(cache.resident_keys(), resident, "{policy}: same-budget reopen");
        for k in &resident {
            assert_eq!(&cache.get(k).unwrap().unwrap().payload[..], &payloads[k][..], "{policy}: payload {k}");
            assert!(sim.get(*k));
        }
        reloaded += resident.len();
        drop(cache);

        let small = sim.bytes() / 2;
        let evicted = sim.reload(small);
        let cache = open_store(config(small)).unwrap();
        let s = cache.stats_snapshot();
        assert!(s.bytes_cached <= small, "{policy}: reload over budget");
        assert_eq!(s.evictions, evicted.len() as u64, "{policy}");
        assert_eq!(cache.resident_keys(), sim.resident(), "{policy}: reload victims");
        for k in cache.resident_keys() {
            assert_eq!(&cache.get(&k).unwrap().unwrap().payload[..], &payloads[&k][..]);
        }
    }
    format!("{reloaded} entries byte-identical after reopen; smaller-budget reloads evict in policy order")
}

fn pushdown() -> String {
    let mut rng = Rng::new(0x9d);
    let mut skipped = 0;
    const TRIALS: u64 = 500;
    for trial in 0..TRIALS {
        let t = random_table(0x7777_0000 + trial, 5, 4000);
        let (storage, paths, _) = mem_tables(std::slice::from_ref(&t));
        let (pred, agg) = random_query(&mut rng, &t);
        let (expect, matched) = no_pushdown_oracle(&t, &pred, agg);
        for mode in CacheMode::ALL {
            let r = engine(mode, &storage).run_query(&paths, &pred, agg).unwrap().result;
            assert_eq!((&r.value, r.rows_matched), (&expect, matched), "trial {trial} {mode}: {pred} {agg}");
            skipped += r.row_groups_skipped;
        }
    }

    // stripe k holds exactly the values 1000k .. 1000k+999
    let rows: Vec<Row> = (0..6 * 2000).map(|i| vec![Some(Value::Int64((i / 2000) * 1000 + i % 1000))]).collect();
    let t = RandomTable {
        schema: vec![Column::new("c0", ColumnType::Int64)],
        rows,
        stripe_rows: 2000,
    };
    let (storage, paths, _) = mem_tables(std::slice::from_ref(&t));
    let cases = [
        (CmpOp::Ge, 2500),
        (CmpOp::Lt, 2000),
        (CmpOp::Eq, 4999),
        (CmpOp::Gt, 6000),
        (CmpOp::Le, 0),
        (CmpOp::Ne, 3),
    ];
    for (op, lit) in cases {
        let pred = Predicate::always().and(Atom::new(0, op, lit));
        // a stripe holding every value in lo..=hi is provably empty iff no value in range satisfies the atom
        let expect = (0..6i64)
            .filter(|k| !(k * 1000..k * 1000 + 1000).any(|v| op.holds(Some(v.cmp(&lit)))))
            .count() as u64;
        for mode in CacheMode::ALL {
            let r = engine(mode, &storage).run_query(&paths, &pred, Aggregate::Count).unwrap().result;
            assert_eq!(r.stripes_skipped, expect, "{pred} {mode}");
            assert_eq!(r.value, no_pushdown_oracle(&t, &pred, Aggregate::Count).0);
        }
    }
    format!("{TRIALS} random workloads equal the no-pushdown oracle in 3 modes ({skipped} row groups skipped); disjoint-stripe skips exact")
}

const GOLDEN_SPEC: (u64, usize, usize, usize, &str) = (2024, 3, 2, 1500, "iifs");
const GOLDEN_FILES: [&str; 3] = [
    "8dbc7aa8e5a86b99322d4183e623a74c908c7120f24fc278d3d0e54e25db0ca9",
    "5db058de5531bf9802903c778b173f03876d8c66d2a5f901c6d0e505298c0fd9",
    "26ada85683327f5c93e8039d528418ad727d62064a0694593ab2690f5424fdc4",
];
/// Over every footer, stripe footer and stripe index buffer, in file order.
const GOLDEN_BUFFERS: &str = "6ba74cef903be9c412bebd6e3c27ca716ba647e5f2531346b344e19fe286ae75";

fn golden_digests() -> (Vec<String>, String) {
    let (seed, files, stripes, rows, cols) = GOLDEN_SPEC;
    let spec = GenSpec {
        seed,
        files,
        stripes,
        rows,
        cols: cols.into(),
    };
    let mut file_digests = Vec::new();
    let mut buffers = Sha256::new();
    for i in 0..files {
        let written = spec.generate_file(i).unwrap();
        file_digests.push(hex::encode(Sha256::digest(&written.bytes)));
        let src = written.bytes.as_slice();
        let footer = read_footer(src).unwrap();
        buffers.update(encode_footer_buf(&footer).as_bytes());
        for s in 0..footer.stripes.len() {
            buffers.update(encode_stripe_footer_buf(&read_stripe_footer(src, &footer, s).unwrap()).as_bytes());
            let ix = read_stripe_index(src, &footer, s).unwrap();
            buffers.update(encode_stripe_index_buf(&ix, &footer.column_types()).as_bytes());
        }
    }
    (file_digests, hex::encode(buffers.finalize()))
}

fn format_stability() -> String {
    let mut first = splitmix64(0);
    let mut oracle = Rng::new(0);
    assert_eq!(rand_core::RngCore::next_u64(&mut first), 0xE220_A839_7B1D_CDAF);
    assert_eq!(oracle.next(), 0xE220_A839_7B1D_CDAF);
    let a = golden_digests();
    let b = golden_digests();
    assert_eq!(a, b, "generation is not deterministic");
    let (files, buffers) = a;
    for (i, (got, want)) in files.iter().zip(GOLDEN_FILES).enumerate() {
        assert_eq!(got, want, "file {i} digest");
    }
    assert_eq!(buffers, GOLDEN_BUFFERS, "object buffer digest");
    format!("{} files and their object buffers match golden sha256 digests", files.len())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> String); 8] = [
        ("correctness oracle", correctness_oracle),
        ("warm-read cost counters", warm_counters),
        ("warm-read CPU ordering", warm_cpu_ordering),
        ("cold-write overhead ordering", cold_overhead_ordering),
        ("eviction-policy oracle", eviction_oracle),
        ("persistence", persistence),
        ("pushdown", pushdown),
        ("format stability", format_stability),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name} ({secs:.1}s): {detail}", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("[FAIL] {}. {name} ({secs:.1}s): {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
