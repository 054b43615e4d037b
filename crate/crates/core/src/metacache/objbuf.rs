//! Flat object buffers for metadata sections.
//!
//! A buffer is a fixed header followed by fixed-stride record tables and a
//! string heap. Decoding checks the header and does bounds arithmetic on the
//! table extents only, so it costs the same for a 1 KiB or a 1 MiB buffer;
//! fields are then read in place by offset. All integers are little-endian,
//! tables start 8-byte aligned and padding is zero.
//!
//! Footer buffer header (56 bytes):
//!
//! ```text
//! [0] "OBF1"  [4] u8 kind=0  [8] u32 version  [12] u32 num_columns
//! [16] u64 num_rows  [24] u32 num_stripes
//! [32] u32 col_table_off  [36] u32 stripe_table_off  [40] u32 stats_table_off
//! [44] u32 heap_off  [48] u32 heap_len
//! ```
//!
//! Stripe-footer header (16 bytes): magic, kind=1, `[8] u32 num_columns`.
//! Stripe-index header (24 bytes): magic, kind=2, `[8] u32 num_columns`,
//! `[12] u32 num_row_groups`, `[16] u32 heap_off`, `[20] u32 heap_len`; the
//! per-column regions follow the header at stride `32 + 40 * num_row_groups`.
//!
//! Stats records (32 bytes) are `u8 flags, pad7, u64 min_bits, u64 max_bits,
//! u64 null_count`. Flag bit 0 is has-min/max and bits 1..=2 hold the column
//! type code, which makes index buffers self-describing. Utf8 bounds pack a
//! heap-relative `u32 offset` (low half) and `u32 length` (high half).

use std::sync::Arc;

use thiserror::Error;

use crate::colfile::{
    Column, ColumnIndex, ColumnStats, ColumnType, Encoding, FileFooter, FooterAccess,
    FormatError, RowGroupEntry, RowGroupRef, StatsRef, StreamInfo, StripeFooter,
    StripeFooterAccess, StripeIndex, StripeIndexAccess, StripeInfo, Value, ValueRef,
};

use super::key::SectionKind;

pub const BUF_MAGIC: &[u8; 4] = b"OBF1";

pub const FOOTER_HEADER_LEN: usize = 56;
pub const COLUMN_RECORD_LEN: usize = 16;
pub const STRIPE_RECORD_LEN: usize = 40;
pub const STATS_RECORD_LEN: usize = 32;
pub const STRIPE_FOOTER_HEADER_LEN: usize = 16;
pub const STREAM_RECORD_LEN: usize = 24;
pub const STRIPE_INDEX_HEADER_LEN: usize = 24;
pub const ROW_GROUP_RECORD_LEN: usize = STATS_RECORD_LEN + 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BufferError {
    #[error("object buffer of {len} bytes is shorter than its {need}-byte header")]
    Truncated { len: usize, need: usize },
    #[error("bad object buffer magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("object buffer holds section kind {found}, expected {expected:?}")]
    WrongKind { expected: SectionKind, found: u8 },
    #[error("{field} at offset {offset} is not 8-byte aligned")]
    Misaligned { field: &'static str, offset: usize },
    #[error("{field} spans {start}..{end}, beyond buffer of {len} bytes")]
    OutOfBounds {
        field: &'static str,
        start: u64,
        end: u64,
        len: usize,
    },
    #[error("stats record at {offset} has invalid flags {flags:#04x}")]
    BadStats { offset: usize, flags: u8 },
    #[error("column record at {offset} has unknown type code {code}")]
    BadTypeCode { offset: usize, code: u8 },
    #[error("string reference {off}+{len} outside heap of {heap_len} bytes")]
    BadHeapRef { off: u32, len: u32, heap_len: usize },
    #[error("invalid utf-8 in {0}")]
    BadUtf8(&'static str),
    #[error("stream record at {0} has unknown encoding")]
    BadEncoding(usize),
    #[error("{what} index {index} out of range (len {len})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
}

impl From<BufferError> for FormatError {
    fn from(e: BufferError) -> Self {
        match e {
            BufferError::OutOfRange { what, index, len } => FormatError::OutOfRange { what, index, len },
            other => FormatError::Corrupt(other.to_string()),
        }
    }
}

/// An encoded metadata section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectBuffer(Vec<u8>);

impl ObjectBuffer {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

// ---------------------------------------------------------------- encoding

struct Heap(Vec<u8>);

impl Heap {
    fn push(&mut self, bytes: &[u8]) -> (u32, u32) {
        let off = to_u32(self.0.len());
        self.0.extend_from_slice(bytes);
        (off, to_u32(bytes.len()))
    }
}

fn to_u32(v: usize) -> u32 {
    u32::try_from(v).expect("object buffer exceeds 4 GiB")
}

fn put_u32(buf: &mut [u8], at: usize, v: u32) {
    buf[at..at + 4].copy_from_slice(&v.to_le_bytes());
}

fn put_u64(buf: &mut [u8], at: usize, v: u64) {
    buf[at..at + 8].copy_from_slice(&v.to_le_bytes());
}

fn value_bits(v: &Value, heap: &mut Heap) -> u64 {
    match v {
        Value::Int64(x) => *x as u64,
        Value::Float64(x) => x.to_bits(),
        Value::Utf8(s) => {
            let (off, len) = heap.push(s.as_bytes());
            off as u64 | (len as u64) << 32
        }
    }
}

fn put_stats_record(buf: &mut [u8], at: usize, ty: ColumnType, s: &ColumnStats, heap: &mut Heap) {
    let mut flags = ty.code() << 1;
    if let Some((lo, hi)) = &s.minmax {
        flags |= 1;
        put_u64(buf, at + 8, value_bits(lo, heap));
        put_u64(buf, at + 16, value_bits(hi, heap));
    }
    buf[at] = flags;
    put_u64(buf, at + 24, s.null_count);
}

fn finish_with_heap(mut buf: Vec<u8>, heap: Heap) -> Vec<u8> {
    buf.extend_from_slice(&heap.0);
    buf.resize(buf.len().next_multiple_of(8), 0);
    buf
}

fn header(buf: &mut [u8], kind: SectionKind) {
    buf[..4].copy_from_slice(BUF_MAGIC);
    buf[4] = kind as u8;
}

pub fn encode_footer_buf(f: &FileFooter) -> ObjectBuffer {
    let ncols = f.columns.len();
    let col_off = FOOTER_HEADER_LEN;
    let stripe_off = col_off + COLUMN_RECORD_LEN * ncols;
    let stats_off = stripe_off + STRIPE_RECORD_LEN * f.stripes.len();
    let heap_off = stats_off + STATS_RECORD_LEN * ncols;

    let mut buf = vec![0u8; heap_off];
    let mut heap = Heap(Vec::new());
    header(&mut buf, SectionKind::Footer);
    put_u32(&mut buf, 8, f.version);
    put_u32(&mut buf, 12, to_u32(ncols));
    put_u64(&mut buf, 16, f.num_rows);
    put_u32(&mut buf, 24, to_u32(f.stripes.len()));
    put_u32(&mut buf, 32, to_u32(col_off));
    put_u32(&mut buf, 36, to_u32(stripe_off));
    put_u32(&mut buf, 40, to_u32(stats_off));
    put_u32(&mut buf, 44, to_u32(heap_off));

    for (i, c) in f.columns.iter().enumerate() {
        let at = col_off + i * COLUMN_RECORD_LEN;
        let (off, len) = heap.push(c.name.as_bytes());
        buf[at] = c.ty.code();
        put_u32(&mut buf, at + 4, off);
        put_u32(&mut buf, at + 8, len);
    }
    for (i, s) in f.stripes.iter().enumerate() {
        let at = stripe_off + i * STRIPE_RECORD_LEN;
        for (j, v) in [s.stripe_offset, s.index_len, s.data_len, s.footer_len, s.num_rows]
            .into_iter()
            .enumerate()
        {
            put_u64(&mut buf, at + 8 * j, v);
        }
    }
    for (i, (c, s)) in f.columns.iter().zip(&f.file_stats).enumerate() {
        put_stats_record(&mut buf, stats_off + i * STATS_RECORD_LEN, c.ty, s, &mut heap);
    }
    put_u32(&mut buf, 48, to_u32(heap.0.len()));
    ObjectBuffer(finish_with_heap(buf, heap))
}

pub fn encode_stripe_footer_buf(sf: &StripeFooter) -> ObjectBuffer {
    let mut buf = vec![0u8; STRIPE_FOOTER_HEADER_LEN + STREAM_RECORD_LEN * sf.streams.len()];
    header(&mut buf, SectionKind::StripeFooter);
    put_u32(&mut buf, 8, to_u32(sf.streams.len()));
    for (i, s) in sf.streams.iter().enumerate() {
        let at = STRIPE_FOOTER_HEADER_LEN + i * STREAM_RECORD_LEN;
        put_u64(&mut buf, at, s.chunk_offset);
        put_u64(&mut buf, at + 8, s.chunk_len);
        buf[at + 16] = s.encoding as u8;
    }
    ObjectBuffer(buf)
}

/// Encodes a stripe index; `types` is the file schema, needed to tag stats
/// records that carry no bounds.
pub fn encode_stripe_index_buf(ix: &StripeIndex, types: &[ColumnType]) -> ObjectBuffer {
    assert_eq!(ix.columns.len(), types.len(), "stripe index does not match schema");
    let nrg = ix.num_row_groups as usize;
    let stride = STATS_RECORD_LEN + ROW_GROUP_RECORD_LEN * nrg;
    let heap_off = STRIPE_INDEX_HEADER_LEN + stride * ix.columns.len();

    let mut buf = vec![0u8; heap_off];
    let mut heap = Heap(Vec::new());
    header(&mut buf, SectionKind::StripeIndex);
    put_u32(&mut buf, 8, to_u32(ix.columns.len()));
    put_u32(&mut buf, 12, ix.num_row_groups);
    put_u32(&mut buf, 16, to_u32(heap_off));
    for (ci, (col, &ty)) in ix.columns.iter().zip(types).enumerate() {
        let base = STRIPE_INDEX_HEADER_LEN + ci * stride;
        put_stats_record(&mut buf, base, ty, &col.stripe_stats, &mut heap);
        for (gi, rg) in col.row_groups.iter().enumerate() {
            let at = base + STATS_RECORD_LEN + gi * ROW_GROUP_RECORD_LEN;
            put_stats_record(&mut buf, at, ty, &rg.stats, &mut heap);
            put_u64(&mut buf, at + STATS_RECORD_LEN, rg.byte_offset);
        }
    }
    put_u32(&mut buf, 20, to_u32(heap.0.len()));
    ObjectBuffer(finish_with_heap(buf, heap))
}

// ---------------------------------------------------------------- decoding

fn rd_u32(buf: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(buf[at..at + 4].try_into().unwrap())
}

fn rd_u64(buf: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(buf[at..at + 8].try_into().unwrap())
}

fn check_header(buf: &[u8], kind: SectionKind, header_len: usize) -> Result<(), BufferError> {
    if buf.len() < header_len {
        return Err(BufferError::Truncated {
            len: buf.len(),
            need: header_len,
        });
    }
    if &buf[..4] != BUF_MAGIC {
        return Err(BufferError::BadMagic(buf[..4].try_into().unwrap()));
    }
    if buf[4] != kind as u8 {
        return Err(BufferError::WrongKind {
            expected: kind,
            found: buf[4],
        });
    }
    Ok(())
}

/// Checks that a table of `count` records of `stride` bytes at `offset` lies
/// inside the buffer. Pure arithmetic; the table itself is not read.
fn check_table(
    buf: &[u8],
    field: &'static str,
    offset: usize,
    count: usize,
    stride: usize,
) -> Result<(), BufferError> {
    if !offset.is_multiple_of(8) {
        return Err(BufferError::Misaligned { field, offset });
    }
    let end = offset as u64 + count as u64 * stride as u64;
    if end > buf.len() as u64 {
        return Err(BufferError::OutOfBounds {
            field,
            start: offset as u64,
            end,
            len: buf.len(),
        });
    }
    Ok(())
}

fn check_index(what: &'static str, index: usize, len: usize) -> Result<(), BufferError> {
    if index < len {
        Ok(())
    } else {
        Err(BufferError::OutOfRange { what, index, len })
    }
}

#[derive(Debug, Clone, Copy)]
struct HeapRange {
    off: usize,
    len: usize,
}

impl HeapRange {
    fn slice<'a>(&self, buf: &'a [u8], off: u32, len: u32) -> Result<&'a [u8], BufferError> {
        let end = off as u64 + len as u64;
        if end > self.len as u64 {
            return Err(BufferError::BadHeapRef {
                off,
                len,
                heap_len: self.len,
            });
        }
        let start = self.off + off as usize;
        Ok(&buf[start..start + len as usize])
    }
}

fn read_stats<'a>(
    buf: &'a [u8],
    at: usize,
    heap: HeapRange,
    expected: Option<ColumnType>,
) -> Result<StatsRef<'a>, BufferError> {
    let flags = buf[at];
    let bad = || BufferError::BadStats { offset: at, flags };
    if flags & !0b111 != 0 {
        return Err(bad());
    }
    let ty = ColumnType::from_code(flags >> 1).ok_or_else(bad)?;
    if expected.is_some_and(|e| e != ty) {
        return Err(bad());
    }
    let null_count = rd_u64(buf, at + 24);
    if flags & 1 == 0 {
        return Ok(StatsRef {
            minmax: None,
            null_count,
        });
    }
    let value = |bits: u64| -> Result<ValueRef<'a>, BufferError> {
        Ok(match ty {
            ColumnType::Int64 => ValueRef::Int64(bits as i64),
            ColumnType::Float64 => ValueRef::Float64(f64::from_bits(bits)),
            ColumnType::Utf8 => ValueRef::Utf8(heap.slice(buf, bits as u32, (bits >> 32) as u32)?),
        })
    };
    Ok(StatsRef {
        minmax: Some((value(rd_u64(buf, at + 8))?, value(rd_u64(buf, at + 16))?)),
        null_count,
    })
}

fn stats_to_owned(s: StatsRef<'_>) -> Result<ColumnStats, BufferError> {
    s.to_stats().map_err(|_| BufferError::BadUtf8("string statistic"))
}

/// Zero-copy view of an encoded file footer.
#[derive(Debug, Clone)]
pub struct FooterView {
    buf: Arc<[u8]>,
    version: u32,
    num_columns: usize,
    num_rows: u64,
    num_stripes: usize,
    col_off: usize,
    stripe_off: usize,
    stats_off: usize,
    heap: HeapRange,
}

/// A column record read from a [`FooterView`].
#[derive(Debug, Clone, Copy)]
pub struct ColumnRef<'a> {
    pub ty: ColumnType,
    pub name: &'a [u8],
}

pub fn decode_footer_view(buf: Arc<[u8]>) -> Result<FooterView, BufferError> {
    let b = &buf[..];
    check_header(b, SectionKind::Footer, FOOTER_HEADER_LEN)?;
    let num_columns = rd_u32(b, 12) as usize;
    let num_stripes = rd_u32(b, 24) as usize;
    let col_off = rd_u32(b, 32) as usize;
    let stripe_off = rd_u32(b, 36) as usize;
    let stats_off = rd_u32(b, 40) as usize;
    let heap_off = rd_u32(b, 44) as usize;
    let heap_len = rd_u32(b, 48) as usize;
    check_table(b, "column table", col_off, num_columns, COLUMN_RECORD_LEN)?;
    check_table(b, "stripe table", stripe_off, num_stripes, STRIPE_RECORD_LEN)?;
    check_table(b, "stats table", stats_off, num_columns, STATS_RECORD_LEN)?;
    check_table(b, "heap", heap_off, heap_len, 1)?;
    Ok(FooterView {
        version: rd_u32(b, 8),
        num_rows: rd_u64(b, 16),
        num_columns,
        num_stripes,
        col_off,
        stripe_off,
        stats_off,
        heap: HeapRange {
            off: heap_off,
            len: heap_len,
        },
        buf,
    })
}

impl FooterView {
    pub fn buffer(&self) -> &Arc<[u8]> {
        &self.buf
    }

    pub fn column(&self, col: usize) -> Result<ColumnRef<'_>, BufferError> {
        check_index("column", col, self.num_columns)?;
        let at = self.col_off + col * COLUMN_RECORD_LEN;
        let code = self.buf[at];
        let ty = ColumnType::from_code(code).ok_or(BufferError::BadTypeCode { offset: at, code })?;
        let name = self
            .heap
            .slice(&self.buf, rd_u32(&self.buf, at + 4), rd_u32(&self.buf, at + 8))?;
        Ok(ColumnRef { ty, name })
    }

    fn stripe_record(&self, idx: usize) -> Result<StripeInfo, BufferError> {
        check_index("stripe", idx, self.num_stripes)?;
        let at = self.stripe_off + idx * STRIPE_RECORD_LEN;
        let b = &self.buf[..];
        Ok(StripeInfo {
            stripe_offset: rd_u64(b, at),
            index_len: rd_u64(b, at + 8),
            data_len: rd_u64(b, at + 16),
            footer_len: rd_u64(b, at + 24),
            num_rows: rd_u64(b, at + 32),
        })
    }

    fn stats_record(&self, col: usize) -> Result<StatsRef<'_>, BufferError> {
        let ty = self.column(col)?.ty;
        read_stats(&self.buf, self.stats_off + col * STATS_RECORD_LEN, self.heap, Some(ty))
    }

    /// Materializes the full footer, touching every record.
    pub fn to_footer(&self) -> Result<FileFooter, BufferError> {
        let mut columns = Vec::with_capacity(self.num_columns);
        let mut file_stats = Vec::with_capacity(self.num_columns);
        for i in 0..self.num_columns {
            let c = self.column(i)?;
            let name =
                std::str::from_utf8(c.name).map_err(|_| BufferError::BadUtf8("column name"))?;
            columns.push(Column::new(name, c.ty));
            file_stats.push(stats_to_owned(self.stats_record(i)?)?);
        }
        let stripes = (0..self.num_stripes)
            .map(|i| self.stripe_record(i))
            .collect::<Result<_, _>>()?;
        Ok(FileFooter {
            version: self.version,
            num_rows: self.num_rows,
            columns,
            stripes,
            file_stats,
        })
    }
}

impl FooterAccess for FooterView {
    fn version(&self) -> u32 {
        self.version
    }

    fn num_rows(&self) -> u64 {
        self.num_rows
    }

    fn num_columns(&self) -> usize {
        self.num_columns
    }

    fn column_type(&self, col: usize) -> Result<ColumnType, FormatError> {
        check_index("column", col, self.num_columns)?;
        let at = self.col_off + col * COLUMN_RECORD_LEN;
        let code = self.buf[at];
        Ok(ColumnType::from_code(code).ok_or(BufferError::BadTypeCode { offset: at, code })?)
    }

    fn num_stripes(&self) -> usize {
        self.num_stripes
    }

    fn stripe(&self, idx: usize) -> Result<StripeInfo, FormatError> {
        Ok(self.stripe_record(idx)?)
    }

    fn file_stats(&self, col: usize) -> Result<StatsRef<'_>, FormatError> {
        Ok(self.stats_record(col)?)
    }
}

/// Zero-copy view of an encoded stripe footer.
#[derive(Debug, Clone)]
pub struct StripeFooterView {
    buf: Arc<[u8]>,
    num_columns: usize,
}

pub fn decode_stripe_footer_view(buf: Arc<[u8]>) -> Result<StripeFooterView, BufferError> {
    check_header(&buf, SectionKind::StripeFooter, STRIPE_FOOTER_HEADER_LEN)?;
    let num_columns = rd_u32(&buf, 8) as usize;
    check_table(&buf, "stream table", STRIPE_FOOTER_HEADER_LEN, num_columns, STREAM_RECORD_LEN)?;
    Ok(StripeFooterView { buf, num_columns })
}

impl StripeFooterView {
    fn stream_record(&self, col: usize) -> Result<StreamInfo, BufferError> {
        check_index("stream", col, self.num_columns)?;
        let at = STRIPE_FOOTER_HEADER_LEN + col * STREAM_RECORD_LEN;
        let encoding = Encoding::from_code(self.buf[at + 16]).ok_or(BufferError::BadEncoding(at))?;
        Ok(StreamInfo {
            chunk_offset: rd_u64(&self.buf, at),
            chunk_len: rd_u64(&self.buf, at + 8),
            encoding,
        })
    }

    pub fn to_stripe_footer(&self) -> Result<StripeFooter, BufferError> {
        let streams = (0..self.num_columns)
            .map(|i| self.stream_record(i))
            .collect::<Result<_, _>>()?;
        Ok(StripeFooter { streams })
    }
}

impl StripeFooterAccess for StripeFooterView {
    fn num_streams(&self) -> usize {
        self.num_columns
    }

    fn stream(&self, col: usize) -> Result<StreamInfo, FormatError> {
        Ok(self.stream_record(col)?)
    }
}

/// Zero-copy view of an encoded stripe index.
#[derive(Debug, Clone)]
pub struct StripeIndexView {
    buf: Arc<[u8]>,
    num_columns: usize,
    num_row_groups: usize,
    stride: usize,
    heap: HeapRange,
}

pub fn decode_stripe_index_view(buf: Arc<[u8]>) -> Result<StripeIndexView, BufferError> {
    check_header(&buf, SectionKind::StripeIndex, STRIPE_INDEX_HEADER_LEN)?;
    let num_columns = rd_u32(&buf, 8) as usize;
    let num_row_groups = rd_u32(&buf, 12) as usize;
    let heap_off = rd_u32(&buf, 16) as usize;
    let heap_len = rd_u32(&buf, 20) as usize;
    let stride = STATS_RECORD_LEN + ROW_GROUP_RECORD_LEN * num_row_groups;
    check_table(&buf, "column regions", STRIPE_INDEX_HEADER_LEN, num_columns, stride)?;
    check_table(&buf, "heap", heap_off, heap_len, 1)?;
    Ok(StripeIndexView {
        buf,
        num_columns,
        num_row_groups,
        stride,
        heap: HeapRange {
            off: heap_off,
            len: heap_len,
        },
    })
}

impl StripeIndexView {
    fn region(&self, col: usize) -> Result<usize, BufferError> {
        check_index("column", col, self.num_columns)?;
        Ok(STRIPE_INDEX_HEADER_LEN + col * self.stride)
    }

    fn stripe_stats_record(&self, col: usize) -> Result<StatsRef<'_>, BufferError> {
        read_stats(&self.buf, self.region(col)?, self.heap, None)
    }

    fn row_group_record(&self, col: usize, group: usize) -> Result<RowGroupRef<'_>, BufferError> {
        let base = self.region(col)?;
        check_index("row group", group, self.num_row_groups)?;
        let at = base + STATS_RECORD_LEN + group * ROW_GROUP_RECORD_LEN;
        Ok(RowGroupRef {
            stats: read_stats(&self.buf, at, self.heap, None)?,
            byte_offset: rd_u64(&self.buf, at + STATS_RECORD_LEN),
        })
    }

    pub fn to_stripe_index(&self) -> Result<StripeIndex, BufferError> {
        let mut columns = Vec::with_capacity(self.num_columns);
        for c in 0..self.num_columns {
            let stripe_stats = stats_to_owned(self.stripe_stats_record(c)?)?;
            let row_groups = (0..self.num_row_groups)
                .map(|g| {
                    let rg = self.row_group_record(c, g)?;
                    Ok(RowGroupEntry {
                        stats: stats_to_owned(rg.stats)?,
                        byte_offset: rg.byte_offset,
                    })
                })
                .collect::<Result<_, BufferError>>()?;
            columns.push(ColumnIndex {
                stripe_stats,
                row_groups,
            });
        }
        Ok(StripeIndex {
            num_row_groups: self.num_row_groups as u32,
            columns,
        })
    }
}

impl StripeIndexAccess for StripeIndexView {
    fn num_columns(&self) -> usize {
        self.num_columns
    }

    fn num_row_groups(&self) -> usize {
        self.num_row_groups
    }

    fn stripe_stats(&self, col: usize) -> Result<StatsRef<'_>, FormatError> {
        Ok(self.stripe_stats_record(col)?)
    }

    fn row_group(&self, col: usize, group: usize) -> Result<RowGroupRef<'_>, FormatError> {
        Ok(self.row_group_record(col, group)?)
    }
}

/// Header-level validation of a buffer against the section kind it is
/// cached under.
pub fn validate_buffer(kind: SectionKind, buf: &Arc<[u8]>) -> Result<(), BufferError> {
    match kind {
        SectionKind::Footer => decode_footer_view(buf.clone()).map(drop),
        SectionKind::StripeFooter => decode_stripe_footer_view(buf.clone()).map(drop),
        SectionKind::StripeIndex => decode_stripe_index_view(buf.clone()).map(drop),
    }
}
