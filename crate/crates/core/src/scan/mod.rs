//! Split-based scans over colfile datasets.
//!
//! Every metadata section a scan touches (file footer, stripe footers,
//! stripe indexes) is loaded through [`ScanEngine`], which routes it through
//! the metadata cache according to its [`CacheMode`]. The cache is populated
//! read-through: the first miss reads from storage and inserts.

mod engine;
mod predicate;
mod result;
mod storage;

pub use engine::{
    CacheMode, FileHandle, FooterRef, Loaded, QueryOutput, ScanEngine, ScanError, Split,
    StripeFooterRef, StripeIndexRef, StripeMeta,
};
pub use predicate::{eval_atom, eval_pushdown, Atom, CmpOp, Predicate, Pushdown};
pub use result::{AggValue, Aggregate, ScanResult};
pub use storage::{FileIdentity, FsStorage, MemStorage, Storage};
