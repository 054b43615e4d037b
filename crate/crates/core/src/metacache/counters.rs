//! Deterministic cost-model counters.
//!
//! Every metadata inflate, canonical-bytes parse, object-buffer encode and
//! object-buffer decode performed by the read path goes through
//! [`CostCounters`], which makes the per-mode work observable without timing.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::colfile::{
    inflate_section, parse_footer, parse_stripe_footer, parse_stripe_index, ColumnType,
    FileFooter, FormatError, StripeFooter, StripeIndex,
};

use super::objbuf::{
    decode_footer_view, decode_stripe_footer_view, decode_stripe_index_view,
    encode_footer_buf, encode_stripe_footer_buf, encode_stripe_index_buf, BufferError,
    FooterView, ObjectBuffer, StripeFooterView, StripeIndexView,
};

#[derive(Debug, Default)]
pub struct CostCounters {
    inflate: AtomicU64,
    deserialize: AtomicU64,
    encode: AtomicU64,
    decode: AtomicU64,
}

fn bump(c: &AtomicU64) {
    c.fetch_add(1, Ordering::Relaxed);
}

impl CostCounters {
    pub fn inflate(&self, compressed: &[u8]) -> Result<Vec<u8>, FormatError> {
        bump(&self.inflate);
        inflate_section(compressed)
    }

    pub fn parse_footer(&self, raw: &[u8]) -> Result<FileFooter, FormatError> {
        bump(&self.deserialize);
        parse_footer(raw)
    }

    pub fn parse_stripe_footer(&self, raw: &[u8]) -> Result<StripeFooter, FormatError> {
        bump(&self.deserialize);
        parse_stripe_footer(raw)
    }

    pub fn parse_stripe_index(&self, raw: &[u8], types: &[ColumnType]) -> Result<StripeIndex, FormatError> {
        bump(&self.deserialize);
        parse_stripe_index(raw, types)
    }

    pub fn encode_footer(&self, f: &FileFooter) -> ObjectBuffer {
        bump(&self.encode);
        encode_footer_buf(f)
    }

    pub fn encode_stripe_footer(&self, sf: &StripeFooter) -> ObjectBuffer {
        bump(&self.encode);
        encode_stripe_footer_buf(sf)
    }

    pub fn encode_stripe_index(&self, ix: &StripeIndex, types: &[ColumnType]) -> ObjectBuffer {
        bump(&self.encode);
        encode_stripe_index_buf(ix, types)
    }

    pub fn decode_footer(&self, buf: Arc<[u8]>) -> Result<FooterView, BufferError> {
        bump(&self.decode);
        decode_footer_view(buf)
    }

    pub fn decode_stripe_footer(&self, buf: Arc<[u8]>) -> Result<StripeFooterView, BufferError> {
        bump(&self.decode);
        decode_stripe_footer_view(buf)
    }

    pub fn decode_stripe_index(&self, buf: Arc<[u8]>) -> Result<StripeIndexView, BufferError> {
        bump(&self.decode);
        decode_stripe_index_view(buf)
    }

    /// Current values as `[inflate, deserialize, encode, decode]`.
    pub fn load(&self) -> [u64; 4] {
        [&self.inflate, &self.deserialize, &self.encode, &self.decode].map(|c| c.load(Ordering::Relaxed))
    }
}

/// Point-in-time cache statistics. `bytes_cached` is a gauge; everything
/// else only grows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub puts: u64,
    pub evictions: u64,
    pub bytes_cached: u64,
    pub inflate_count: u64,
    pub deserialize_count: u64,
    pub encode_count: u64,
    pub decode_count: u64,
}

impl CacheStats {
    /// Counter growth since `before`; `bytes_cached` keeps the current value.
    pub fn delta_since(&self, before: &CacheStats) -> CacheStats {
        CacheStats {
            hits: self.hits - before.hits,
            misses: self.misses - before.misses,
            puts: self.puts - before.puts,
            evictions: self.evictions - before.evictions,
            bytes_cached: self.bytes_cached,
            inflate_count: self.inflate_count - before.inflate_count,
            deserialize_count: self.deserialize_count - before.deserialize_count,
            encode_count: self.encode_count - before.encode_count,
            decode_count: self.decode_count - before.decode_count,
        }
    }

    pub fn hit_rate(&self) -> f64 {
        let lookups = self.hits + self.misses;
        if lookups == 0 {
            0.0
        } else {
            self.hits as f64 / lookups as f64
        }
    }
}
