//! Eviction policies. Victim choice is a pure function of per-entry
//! bookkeeping, expressed as a rank: the entry with the smallest rank goes
//! first.

use std::fmt;
use std::str::FromStr;

use super::key::CacheKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    Fifo,
    Lru,
    Lfu,
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fifo" => Ok(Policy::Fifo),
            "lru" => Ok(Policy::Lru),
            "lfu" => Ok(Policy::Lfu),
            other => Err(format!("unknown eviction policy {other:?} (expected fifo, lru or lfu)")),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Fifo => "fifo",
            Policy::Lru => "lru",
            Policy::Lfu => "lfu",
        })
    }
}

/// Per-entry bookkeeping. Sequence numbers come from one cache-wide counter
/// that advances on every operation, so they are unique per entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryMeta {
    pub inserted: u64,
    pub last_access: u64,
    pub access_count: u64,
}

impl EntryMeta {
    pub fn new(seq: u64) -> Self {
        EntryMeta {
            inserted: seq,
            last_access: seq,
            access_count: 1,
        }
    }

    pub fn touch(&mut self, seq: u64) {
        self.last_access = seq;
        self.access_count += 1;
    }
}

pub(crate) type Rank = (u64, u64, u64);

/// Eviction rank; smaller is evicted first. LFU breaks count ties by least
/// recent access, then by oldest insertion.
pub(crate) fn rank(policy: Policy, m: &EntryMeta) -> Rank {
    match policy {
        Policy::Fifo => (m.inserted, 0, 0),
        Policy::Lru => (m.last_access, m.inserted, 0),
        Policy::Lfu => (m.access_count, m.last_access, m.inserted),
    }
}

/// Picks the entry the policy evicts next.
pub fn select_victim<'a, I>(policy: Policy, entries: I) -> Option<CacheKey>
where
    I: IntoIterator<Item = (&'a CacheKey, &'a EntryMeta)>,
{
    entries
        .into_iter()
        .min_by_key(|(k, m)| (rank(policy, m), **k))
        .map(|(k, _)| *k)
}
