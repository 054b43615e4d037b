//! Worker-side metadata cache.
//!
//! Entries are keyed per metadata section of a file version ([`CacheKey`])
//! and hold one of two value forms:
//!
//! - [`ValueKind::RawDecompressed`]: the inflated canonical section bytes.
//!   Cheap to produce on a miss, but every hit parses them again.
//! - [`ValueKind::ObjectBuffer`]: the parsed section re-encoded as a flat
//!   buffer ([`objbuf`]). Costs an encode on a miss; a hit only validates the
//!   header and reads fields in place.

mod counters;
mod key;
pub mod objbuf;
mod policy;
mod store;

pub use counters::{CacheStats, CostCounters};
pub use key::{fnv1a64, make_file_id, CacheKey, SectionKind, KEY_LEN};
pub use objbuf::{
    decode_footer_view, decode_stripe_footer_view, decode_stripe_index_view, encode_footer_buf,
    encode_stripe_footer_buf, encode_stripe_index_buf, BufferError, ColumnRef, FooterView,
    ObjectBuffer, StripeFooterView, StripeIndexView,
};
pub use policy::{select_victim, EntryMeta, Policy};
pub use store::{
    open_store, Backend, CacheConfig, CacheError, CacheValue, MetaCache, TraceEvent, ValueKind,
};
