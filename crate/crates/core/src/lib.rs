//! Columnar scan library with a worker-side metadata cache.
//!
//! - [`colfile`]: the file format (writer, reader, metadata sections).
//! - [`metacache`]: byte-budgeted cache of metadata sections, either as
//!   decompressed canonical bytes or as flat object buffers.
//! - [`scan`]: split-based scans with min/max pushdown that load all
//!   metadata through the cache.

pub mod colfile;
pub mod metacache;
pub mod scan;
