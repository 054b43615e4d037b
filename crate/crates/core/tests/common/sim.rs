//! Brute-force eviction simulator: a flat list scanned linearly on every
//! decision, sharing nothing with the library's ordered index.

use stripecache::metacache::{CacheKey, Policy};

#[derive(Debug, Clone)]
pub struct SimEntry {
    pub key: CacheKey,
    pub size: u64,
    pub inserted: u64,
    pub last: u64,
    pub count: u64,
}

#[derive(Debug)]
pub struct Sim {
    pub capacity: u64,
    pub policy: Policy,
    pub seq: u64,
    pub entries: Vec<SimEntry>,
    pub hits: u64,
    pub misses: u64,
    pub evictions: u64,
}

impl Sim {
    pub fn new(capacity: u64, policy: Policy) -> Self {
        Sim {
            capacity,
            policy,
            seq: 0,
            entries: Vec::new(),
            hits: 0,
            misses: 0,
            evictions: 0,
        }
    }

    pub fn bytes(&self) -> u64 {
        self.entries.iter().map(|e| e.size).sum()
    }

    pub fn get(&mut self, key: CacheKey) -> bool {
        self.seq += 1;
        match self.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => {
                e.last = self.seq;
                e.count += 1;
                self.hits += 1;
                true
            }
            None => {
                self.misses += 1;
                false
            }
        }
    }

    /// `None` when the value can never fit.
    pub fn put(&mut self, key: CacheKey, size: u64) -> Option<Vec<CacheKey>> {
        if size > self.capacity {
            return None;
        }
        self.seq += 1;
        self.entries.retain(|e| e.key != key);
        self.entries.push(SimEntry {
            key,
            size,
            inserted: self.seq,
            last: self.seq,
            count: 1,
        });
        Some(self.shrink(Some(key)))
    }

    /// Models a reopen: frequencies are forgotten, then the new budget applies.
    pub fn reload(&mut self, capacity: u64) -> Vec<CacheKey> {
        self.capacity = capacity;
        for e in &mut self.entries {
            e.count = 1;
        }
        self.shrink(None)
    }

    fn shrink(&mut self, keep: Option<CacheKey>) -> Vec<CacheKey> {
        let mut out = Vec::new();
        while self.bytes() > self.capacity {
            let mut victim: Option<usize> = None;
            for (i, e) in self.entries.iter().enumerate() {
                if Some(e.key) == keep {
                    continue;
                }
                victim = match victim {
                    None => Some(i),
                    Some(v) if self.goes_before(e, &self.entries[v]) => Some(i),
                    keep_v => keep_v,
                };
            }
            let Some(v) = victim else { break };
            out.push(self.entries.remove(v).key);
            self.evictions += 1;
        }
        out
    }

    fn goes_before(&self, a: &SimEntry, b: &SimEntry) -> bool {
        match self.policy {
            Policy::Fifo => a.inserted < b.inserted,
            Policy::Lru => a.last < b.last || (a.last == b.last && a.inserted < b.inserted),
            Policy::Lfu => {
                if a.count != b.count {
                    a.count < b.count
                } else if a.last != b.last {
                    a.last < b.last
                } else {
                    a.inserted < b.inserted
                }
            }
        }
    }

    pub fn resident(&self) -> Vec<CacheKey> {
        let mut keys: Vec<_> = self.entries.iter().map(|e| e.key).collect();
        keys.sort();
        keys
    }
}
