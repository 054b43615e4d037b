//! The cache handle: byte-budgeted storage of metadata sections with
//! FIFO/LRU/LFU eviction over an in-memory or directory backend.
//!
//! All bookkeeping lives in one in-memory index guarded by a mutex. The
//! directory backend never does file I/O under that mutex; instead I/O for a
//! key is serialized through one of a fixed set of striped key locks.
//!
//! On disk every entry is a file named by the 26-hex-char key holding
//! `u64 insertion seq ‖ u64 last-access seq ‖ payload`. Access counts are not
//! persisted; they restart at 1 on reopen.

use std::collections::{BTreeSet, HashMap};
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::os::unix::fs::FileExt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, MutexGuard};
use thiserror::Error;

use super::counters::{CacheStats, CostCounters};
use super::key::{fnv1a64, CacheKey};
use super::objbuf::{ObjectBuffer, BUF_MAGIC};
use super::policy::{rank, EntryMeta, Policy, Rank};

const DISK_HEADER_LEN: usize = 16;
const KEY_LOCKS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Memory,
    DiskDir(PathBuf),
}

#[derive(Debug, Clone)]
pub struct CacheConfig {
    pub backend: Backend,
    pub capacity_bytes: u64,
    pub policy: Policy,
}

impl CacheConfig {
    pub fn memory(capacity_bytes: u64, policy: Policy) -> Self {
        CacheConfig {
            backend: Backend::Memory,
            capacity_bytes,
            policy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ValueKind {
    /// Decompressed canonical section bytes; every read re-parses them.
    RawDecompressed = 0,
    /// An encoded object buffer; reads decode a view in place.
    ObjectBuffer = 1,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheValue {
    pub kind: ValueKind,
    pub payload: Arc<[u8]>,
}

impl CacheValue {
    pub fn raw(bytes: impl Into<Arc<[u8]>>) -> Self {
        CacheValue {
            kind: ValueKind::RawDecompressed,
            payload: bytes.into(),
        }
    }

    pub fn object(buf: ObjectBuffer) -> Self {
        CacheValue {
            kind: ValueKind::ObjectBuffer,
            payload: buf.into_bytes().into(),
        }
    }

    /// Bytes counted against capacity.
    pub fn charge(&self) -> u64 {
        self.payload.len() as u64
    }

    fn infer(payload: Arc<[u8]>) -> Self {
        // canonical sections never start with the buffer magic: a footer
        // starts with version 1 and the others with small counts
        let kind = if payload.starts_with(BUF_MAGIC) {
            ValueKind::ObjectBuffer
        } else {
            ValueKind::RawDecompressed
        };
        CacheValue { kind, payload }
    }
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("value of {charge} bytes exceeds cache capacity of {capacity} bytes")]
    Oversize { charge: u64, capacity: u64 },
    #[error("cache capacity must be at least one byte")]
    ZeroCapacity,
    #[error("cache backend error at {}: {source}", path.display())]
    Backend {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn backend_err(path: &Path) -> impl FnOnce(io::Error) -> CacheError + '_ {
    move |source| CacheError::Backend {
        path: path.to_owned(),
        source,
    }
}

/// One cache operation, recorded in linearization order when tracing is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    Get(CacheKey),
    Put(CacheKey, u64),
}

#[derive(Debug)]
struct Entry {
    meta: EntryMeta,
    charge: u64,
    /// Resident payload for the memory backend.
    value: Option<CacheValue>,
}

#[derive(Debug, Default)]
struct State {
    entries: HashMap<CacheKey, Entry>,
    order: BTreeSet<(Rank, CacheKey)>,
    seq: u64,
    bytes: u64,
    hits: u64,
    misses: u64,
    puts: u64,
    evictions: u64,
    trace: Option<Vec<TraceEvent>>,
}

impl State {
    fn next_seq(&mut self) -> u64 {
        self.seq += 1;
        self.seq
    }

    fn record(&mut self, ev: TraceEvent) {
        if let Some(t) = &mut self.trace {
            t.push(ev);
        }
    }

    fn insert(&mut self, policy: Policy, key: CacheKey, entry: Entry) {
        self.bytes += entry.charge;
        self.order.insert((rank(policy, &entry.meta), key));
        self.entries.insert(key, entry);
    }

    fn remove(&mut self, policy: Policy, key: &CacheKey) -> Option<Entry> {
        let entry = self.entries.remove(key)?;
        self.order.remove(&(rank(policy, &entry.meta), *key));
        self.bytes -= entry.charge;
        Some(entry)
    }

    fn touch(&mut self, policy: Policy, key: &CacheKey, seq: u64) -> Option<&Entry> {
        let entry = self.entries.get_mut(key)?;
        self.order.remove(&(rank(policy, &entry.meta), *key));
        entry.meta.touch(seq);
        self.order.insert((rank(policy, &entry.meta), *key));
        Some(entry)
    }

    /// Evicts in policy order until within `capacity`, sparing `keep`.
    fn evict(&mut self, policy: Policy, capacity: u64, keep: Option<CacheKey>) -> Vec<CacheKey> {
        let mut victims = Vec::new();
        while self.bytes > capacity {
            let Some(victim) = self
                .order
                .iter()
                .map(|(_, k)| *k)
                .find(|k| Some(*k) != keep)
            else {
                break;
            };
            self.remove(policy, &victim);
            self.evictions += 1;
            victims.push(victim);
        }
        victims
    }
}

#[derive(Debug)]
struct DiskDir {
    dir: PathBuf,
}

impl DiskDir {
    fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.to_hex())
    }

    fn write(&self, key: &CacheKey, seq: u64, payload: &[u8]) -> Result<(), CacheError> {
        let path = self.path(key);
        let tmp = self.dir.join(format!("{}.tmp", key.to_hex()));
        let mut f = fs::File::create(&tmp).map_err(backend_err(&tmp))?;
        let mut header = [0u8; DISK_HEADER_LEN];
        header[..8].copy_from_slice(&seq.to_le_bytes());
        header[8..].copy_from_slice(&seq.to_le_bytes());
        f.write_all(&header)
            .and_then(|_| f.write_all(payload))
            .map_err(backend_err(&tmp))?;
        drop(f);
        fs::rename(&tmp, &path).map_err(backend_err(&path))
    }

    fn read(&self, key: &CacheKey, access_seq: u64) -> Result<Arc<[u8]>, CacheError> {
        let path = self.path(key);
        let data = fs::read(&path).map_err(backend_err(&path))?;
        if data.len() < DISK_HEADER_LEN {
            return Err(CacheError::Backend {
                path,
                source: io::Error::new(io::ErrorKind::InvalidData, "entry shorter than its header"),
            });
        }
        OpenOptions::new()
            .write(true)
            .open(&path)
            .and_then(|f| f.write_all_at(&access_seq.to_le_bytes(), 8))
            .map_err(backend_err(&path))?;
        Ok(Arc::from(&data[DISK_HEADER_LEN..]))
    }

    fn remove(&self, key: &CacheKey) {
        let path = self.path(key);
        if let Err(e) = fs::remove_file(&path) {
            if e.kind() != io::ErrorKind::NotFound {
                log::warn!("failed to delete evicted cache entry {}: {e}", path.display());
            }
        }
    }

    /// Scans the directory, returning `(key, meta, charge)` for every entry.
    fn scan(&self) -> Result<Vec<(CacheKey, EntryMeta, u64)>, CacheError> {
        let mut out = Vec::new();
        for dirent in fs::read_dir(&self.dir).map_err(backend_err(&self.dir))? {
            let dirent = dirent.map_err(backend_err(&self.dir))?;
            let name = dirent.file_name();
            let Some(name) = name.to_str() else { continue };
            if name.ends_with(".tmp") {
                // interrupted write
                let _ = fs::remove_file(dirent.path());
                continue;
            }
            let Some(key) = CacheKey::from_hex(name) else {
                continue;
            };
            let path = dirent.path();
            let f = fs::File::open(&path).map_err(backend_err(&path))?;
            let len = f.metadata().map_err(backend_err(&path))?.len();
            let mut header = [0u8; DISK_HEADER_LEN];
            if len < DISK_HEADER_LEN as u64 || f.read_exact_at(&mut header, 0).is_err() {
                log::warn!("dropping malformed cache entry {}", path.display());
                let _ = fs::remove_file(&path);
                continue;
            }
            let meta = EntryMeta {
                inserted: u64::from_le_bytes(header[..8].try_into().unwrap()),
                last_access: u64::from_le_bytes(header[8..].try_into().unwrap()),
                access_count: 1,
            };
            out.push((key, meta, len - DISK_HEADER_LEN as u64));
        }
        Ok(out)
    }
}

/// A shareable metadata cache.
#[derive(Debug)]
pub struct MetaCache {
    policy: Policy,
    capacity: u64,
    disk: Option<DiskDir>,
    state: Mutex<State>,
    counters: CostCounters,
    key_locks: Box<[Mutex<()>]>,
}

/// Opens a cache. A directory backend reloads its entries, rebuilding
/// FIFO/LRU order from the stored sequence numbers, and evicts down to
/// `capacity_bytes` if the directory holds more.
pub fn open_store(config: CacheConfig) -> Result<MetaCache, CacheError> {
    MetaCache::open(config)
}

impl MetaCache {
    pub fn open(config: CacheConfig) -> Result<Self, CacheError> {
        if config.capacity_bytes == 0 {
            return Err(CacheError::ZeroCapacity);
        }
        let cache = MetaCache {
            policy: config.policy,
            capacity: config.capacity_bytes,
            disk: None,
            state: Mutex::new(State::default()),
            counters: CostCounters::default(),
            key_locks: (0..KEY_LOCKS).map(|_| Mutex::new(())).collect(),
        };
        match config.backend {
            Backend::Memory => Ok(cache),
            Backend::DiskDir(dir) => cache.open_dir(dir),
        }
    }

    fn open_dir(mut self, dir: PathBuf) -> Result<Self, CacheError> {
        fs::create_dir_all(&dir).map_err(backend_err(&dir))?;
        let probe = dir.join(".probe.tmp");
        fs::write(&probe, b"").map_err(backend_err(&probe))?;
        let _ = fs::remove_file(&probe);

        let disk = DiskDir { dir };
        let mut found = disk.scan()?;
        found.sort_by_key(|(k, m, _)| (m.inserted, *k));
        let victims = {
            let st = self.state.get_mut();
            for (key, meta, charge) in found {
                st.seq = st.seq.max(meta.inserted).max(meta.last_access);
                st.insert(
                    self.policy,
                    key,
                    Entry {
                        meta,
                        charge,
                        value: None,
                    },
                );
            }
            st.evict(self.policy, self.capacity, None)
        };
        for v in &victims {
            disk.remove(v);
        }
        self.disk = Some(disk);
        Ok(self)
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn counters(&self) -> &CostCounters {
        &self.counters
    }

    fn key_lock(&self, key: &CacheKey) -> MutexGuard<'_, ()> {
        let slot = fnv1a64(&key.to_bytes()) as usize % self.key_locks.len();
        self.key_locks[slot].lock()
    }

    /// Looks up `key`. A hit refreshes the entry's recency and frequency.
    /// Backend failures surface as errors; callers treat them as misses.
    pub fn get(&self, key: &CacheKey) -> Result<Option<CacheValue>, CacheError> {
        let Some(disk) = &self.disk else {
            let mut st = self.state.lock();
            let seq = st.next_seq();
            st.record(TraceEvent::Get(*key));
            let value = st
                .touch(self.policy, key, seq)
                .map(|e| e.value.clone().expect("memory entries hold their payload"));
            if value.is_some() {
                st.hits += 1;
            } else {
                st.misses += 1;
            }
            return Ok(value);
        };

        let _guard = self.key_lock(key);
        let seq = {
            let mut st = self.state.lock();
            let seq = st.next_seq();
            st.record(TraceEvent::Get(*key));
            if st.touch(self.policy, key, seq).is_none() {
                st.misses += 1;
                return Ok(None);
            }
            seq
        };
        match disk.read(key, seq) {
            Ok(payload) => {
                self.state.lock().hits += 1;
                Ok(Some(CacheValue::infer(payload)))
            }
            Err(e) => {
                let mut st = self.state.lock();
                st.remove(self.policy, key);
                st.misses += 1;
                drop(st);
                disk.remove(key);
                Err(e)
            }
        }
    }

    /// Stores `value` under `key`, replacing any previous entry, and returns
    /// the keys evicted to stay within capacity. A replacement counts as a
    /// fresh insertion for every policy.
    pub fn put(&self, key: CacheKey, value: CacheValue) -> Result<Vec<CacheKey>, CacheError> {
        let charge = value.charge();
        let Some(disk) = &self.disk else {
            let mut st = self.state.lock();
            st.record(TraceEvent::Put(key, charge));
            if charge > self.capacity {
                return Err(CacheError::Oversize {
                    charge,
                    capacity: self.capacity,
                });
            }
            let seq = st.next_seq();
            st.remove(self.policy, &key);
            st.insert(
                self.policy,
                key,
                Entry {
                    meta: EntryMeta::new(seq),
                    charge,
                    value: Some(value),
                },
            );
            st.puts += 1;
            return Ok(st.evict(self.policy, self.capacity, Some(key)));
        };

        let guard = self.key_lock(&key);
        let seq = {
            let mut st = self.state.lock();
            st.record(TraceEvent::Put(key, charge));
            if charge > self.capacity {
                return Err(CacheError::Oversize {
                    charge,
                    capacity: self.capacity,
                });
            }
            st.next_seq()
        };
        disk.write(&key, seq, &value.payload)?;
        let victims = {
            let mut st = self.state.lock();
            st.remove(self.policy, &key);
            st.insert(
                self.policy,
                key,
                Entry {
                    meta: EntryMeta::new(seq),
                    charge,
                    value: None,
                },
            );
            st.puts += 1;
            st.evict(self.policy, self.capacity, Some(key))
        };
        drop(guard);
        for v in &victims {
            let _guard = self.key_lock(v);
            // a concurrent put may have re-inserted it since
            if !self.state.lock().entries.contains_key(v) {
                disk.remove(v);
            }
        }
        Ok(victims)
    }

    pub fn stats_snapshot(&self) -> CacheStats {
        let st = self.state.lock();
        let [inflate_count, deserialize_count, encode_count, decode_count] = self.counters.load();
        CacheStats {
            hits: st.hits,
            misses: st.misses,
            puts: st.puts,
            evictions: st.evictions,
            bytes_cached: st.bytes,
            inflate_count,
            deserialize_count,
            encode_count,
            decode_count,
        }
    }

    /// Resident keys, sorted.
    pub fn resident_keys(&self) -> Vec<CacheKey> {
        let mut keys: Vec<_> = self.state.lock().entries.keys().copied().collect();
        keys.sort();
        keys
    }

    pub fn len(&self) -> usize {
        self.state.lock().entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entry_meta(&self, key: &CacheKey) -> Option<EntryMeta> {
        self.state.lock().entries.get(key).map(|e| e.meta)
    }

    /// Starts recording every get/put in linearization order.
    pub fn enable_trace(&self) {
        self.state.lock().trace.get_or_insert_with(Vec::new);
    }

    pub fn take_trace(&self) -> Vec<TraceEvent> {
        self.state
            .lock()
            .trace
            .as_mut()
            .map(std::mem::take)
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(n: usize, fill: u8) -> CacheValue {
        CacheValue::raw(vec![fill; n])
    }

    fn mem(cap: u64, policy: Policy) -> MetaCache {
        MetaCache::open(CacheConfig::memory(cap, policy)).unwrap()
    }

    #[test]
    fn fresh_cache_is_zeroed() {
        assert_eq!(mem(10, Policy::Lru).stats_snapshot(), CacheStats::default());
    }

    #[test]
    fn hit_after_put() {
        let c = mem(100, Policy::Lru);
        let k = CacheKey::footer(1);
        assert_eq!(c.get(&k).unwrap(), None);
        c.put(k, val(10, 7)).unwrap();
        assert_eq!(c.get(&k).unwrap(), Some(val(10, 7)));
        let s = c.stats_snapshot();
        assert_eq!((s.hits, s.misses, s.puts, s.bytes_cached), (1, 1, 1, 10));
    }

    #[test]
    fn second_put_evicts_first() {
        for policy in [Policy::Fifo, Policy::Lru, Policy::Lfu] {
            let c = mem(100, policy);
            c.put(CacheKey::footer(1), val(60, 1)).unwrap();
            let evicted = c.put(CacheKey::footer(2), val(60, 2)).unwrap();
            assert_eq!(evicted, vec![CacheKey::footer(1)], "{policy}");
            assert_eq!(c.get(&CacheKey::footer(1)).unwrap(), None);
            assert_eq!(c.stats_snapshot().evictions, 1);
        }
    }

    #[test]
    fn replace_releases_old_charge() {
        let c = mem(100, Policy::Lru);
        let k = CacheKey::footer(1);
        c.put(k, val(40, 1)).unwrap();
        c.put(k, val(25, 2)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.stats_snapshot().bytes_cached, 25);
        assert_eq!(c.get(&k).unwrap(), Some(val(25, 2)));
    }

    #[test]
    fn oversize_rejected_without_change() {
        let c = mem(100, Policy::Lru);
        c.put(CacheKey::footer(1), val(50, 1)).unwrap();
        let before = c.stats_snapshot();
        assert!(matches!(
            c.put(CacheKey::footer(2), val(101, 1)),
            Err(CacheError::Oversize { charge: 101, capacity: 100 })
        ));
        assert_eq!(c.stats_snapshot(), before);
        assert_eq!(c.resident_keys(), vec![CacheKey::footer(1)]);
    }

    #[test]
    fn zero_capacity_rejected() {
        assert!(matches!(
            MetaCache::open(CacheConfig::memory(0, Policy::Lru)),
            Err(CacheError::ZeroCapacity)
        ));
    }

    fn two_entry_trace(policy: Policy) -> Vec<CacheKey> {
        let c = mem(20, policy);
        let (a, b, cc) = (CacheKey::footer(1), CacheKey::footer(2), CacheKey::footer(3));
        c.put(a, val(10, 0)).unwrap();
        c.put(b, val(10, 0)).unwrap();
        c.get(&a).unwrap();
        c.put(cc, val(10, 0)).unwrap()
    }

    #[test]
    fn policy_victims_on_reference_trace() {
        assert_eq!(two_entry_trace(Policy::Fifo), vec![CacheKey::footer(1)]);
        assert_eq!(two_entry_trace(Policy::Lru), vec![CacheKey::footer(2)]);
        assert_eq!(two_entry_trace(Policy::Lfu), vec![CacheKey::footer(2)]);
    }

    #[test]
    fn lfu_keeps_frequent_entry() {
        let c = mem(20, Policy::Lfu);
        let (a, b, cc) = (CacheKey::footer(1), CacheKey::footer(2), CacheKey::footer(3));
        c.put(a, val(10, 0)).unwrap();
        c.get(&a).unwrap();
        c.put(b, val(10, 0)).unwrap();
        assert_eq!(c.put(cc, val(10, 0)).unwrap(), vec![b]);
    }

    #[test]
    fn value_kind_inferred_from_magic() {
        assert_eq!(CacheValue::infer(Arc::from(&b"OBF1xxxx"[..])).kind, ValueKind::ObjectBuffer);
        assert_eq!(CacheValue::infer(Arc::from(&[1u8, 0, 0, 0][..])).kind, ValueKind::RawDecompressed);
    }

    #[test]
    fn trace_records_operations() {
        let c = mem(100, Policy::Lru);
        c.enable_trace();
        let k = CacheKey::footer(9);
        c.get(&k).unwrap();
        c.put(k, val(3, 0)).unwrap();
        assert_eq!(c.take_trace(), vec![TraceEvent::Get(k), TraceEvent::Put(k, 3)]);
        assert!(c.take_trace().is_empty());
    }
}
