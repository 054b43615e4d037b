//! A small self-contained columnar file format.
//!
//! ```text
//! "OCF1" [stripe 0: index | data | stripe footer] ... [stripe N-1]
//!        [file footer] [u32 footer_compressed_len] "OCF1"
//! ```
//!
//! Every metadata section and every column chunk is independently
//! raw-DEFLATE compressed. Each stripe is split into row groups of
//! [`ROW_GROUP_ROWS`] rows with their own min/max statistics in the stripe
//! index, so scans can skip both whole stripes and row groups.

mod chunk;
mod codec;
mod compress;
mod error;
mod reader;
mod stats;
mod types;
mod value;
mod writer;

pub use chunk::ColumnChunk;
pub use codec::{
    parse_footer, parse_stripe_footer, parse_stripe_index, serialize_footer,
    serialize_stripe_footer, serialize_stripe_index, stats_len,
};
pub use compress::{deflate_section, deflate_section_with_level, inflate_section, DEFAULT_LEVEL};
pub use error::FormatError;
pub use reader::{
    locate_footer, read_column_chunk, read_footer, read_footer_section, read_stripe_footer,
    read_stripe_footer_section, read_stripe_index, read_stripe_index_section, DiskFile,
    FileSource, FooterLocation,
};
pub use stats::{compute_stats, ColumnStats, StatsBuilder, StatsRef};
pub use types::{
    num_row_groups, row_group_rows, Column, ColumnIndex, Encoding, FileFooter, FooterAccess,
    RowGroupEntry, RowGroupRef, StreamInfo, StripeFooter, StripeFooterAccess, StripeIndex,
    StripeIndexAccess, StripeInfo,
};
pub use value::{ColumnType, Value, ValueRef};
pub use writer::{write_file, write_file_with, Row, WriteOptions, WrittenFile};

pub const MAGIC: &[u8; 4] = b"OCF1";
pub const FORMAT_VERSION: u32 = 1;
pub const ROW_GROUP_ROWS: u64 = 1024;
