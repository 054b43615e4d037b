//! Canonical little-endian serialization of the metadata sections.
//!
//! These are the decompressed bytes stored in the file (before DEFLATE) and
//! the payload of raw-bytes cache entries. Parsing is strict: every accepted
//! input re-serializes to the same bytes.

use super::error::FormatError;
use super::stats::ColumnStats;
use super::types::{
    Column, ColumnIndex, Encoding, FileFooter, RowGroupEntry, StreamInfo, StripeFooter,
    StripeIndex, StripeInfo,
};
use super::value::{ColumnType, Value};
use super::FORMAT_VERSION;

pub(crate) struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        ByteReader { buf, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.buf.len() - self.pos < n {
            return Err(FormatError::Truncated {
                offset: self.buf.len(),
                field_offset: self.pos,
                needed: n,
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub(crate) fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn finish(self) -> Result<(), FormatError> {
        if self.pos != self.buf.len() {
            return Err(FormatError::parse(
                self.pos,
                format!("{} trailing bytes", self.buf.len() - self.pos),
            ));
        }
        Ok(())
    }
}

fn put_value(out: &mut Vec<u8>, v: &Value) {
    match v {
        Value::Int64(x) => out.extend_from_slice(&x.to_le_bytes()),
        Value::Float64(x) => out.extend_from_slice(&x.to_bits().to_le_bytes()),
        Value::Utf8(s) => {
            out.extend_from_slice(&(s.len() as u32).to_le_bytes());
            out.extend_from_slice(s.as_bytes());
        }
    }
}

pub(crate) fn put_stats(out: &mut Vec<u8>, s: &ColumnStats) {
    match &s.minmax {
        Some((lo, hi)) => {
            out.push(1);
            put_value(out, lo);
            put_value(out, hi);
        }
        None => out.push(0),
    }
    out.extend_from_slice(&s.null_count.to_le_bytes());
}

fn read_value(r: &mut ByteReader<'_>, ty: ColumnType) -> Result<Value, FormatError> {
    Ok(match ty {
        ColumnType::Int64 => Value::Int64(r.u64()? as i64),
        ColumnType::Float64 => Value::Float64(f64::from_bits(r.u64()?)),
        ColumnType::Utf8 => {
            let len = r.u32()? as usize;
            let at = r.pos();
            let bytes = r.take(len)?;
            let s = std::str::from_utf8(bytes)
                .map_err(|e| FormatError::parse(at + e.valid_up_to(), "invalid utf-8 in string"))?;
            Value::Utf8(s.to_owned())
        }
    })
}

pub(crate) fn read_stats(r: &mut ByteReader<'_>, ty: ColumnType) -> Result<ColumnStats, FormatError> {
    let at = r.pos();
    let minmax = match r.u8()? {
        0 => None,
        1 => Some((read_value(r, ty)?, read_value(r, ty)?)),
        other => return Err(FormatError::parse(at, format!("has_minmax flag {other}"))),
    };
    Ok(ColumnStats {
        minmax,
        null_count: r.u64()?,
    })
}

/// Serialized size of `s`, matching `put_stats`.
pub fn stats_len(s: &ColumnStats) -> usize {
    let value_len = |v: &Value| match v {
        Value::Utf8(s) => 4 + s.len(),
        _ => 8,
    };
    1 + 8 + s.minmax.as_ref().map_or(0, |(lo, hi)| value_len(lo) + value_len(hi))
}

pub fn serialize_footer(f: &FileFooter) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + f.columns.len() * 48 + f.stripes.len() * 40);
    out.extend_from_slice(&f.version.to_le_bytes());
    out.extend_from_slice(&f.num_rows.to_le_bytes());
    out.extend_from_slice(&(f.columns.len() as u32).to_le_bytes());
    for c in &f.columns {
        out.push(c.ty.code());
        out.extend_from_slice(&(c.name.len() as u16).to_le_bytes());
        out.extend_from_slice(c.name.as_bytes());
    }
    out.extend_from_slice(&(f.stripes.len() as u32).to_le_bytes());
    for s in &f.stripes {
        for v in [s.stripe_offset, s.index_len, s.data_len, s.footer_len, s.num_rows] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    for s in &f.file_stats {
        put_stats(&mut out, s);
    }
    out
}

pub fn parse_footer(b: &[u8]) -> Result<FileFooter, FormatError> {
    let mut r = ByteReader::new(b);
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(FormatError::parse(0, format!("unknown version {version}")));
    }
    let num_rows = r.u64()?;
    let num_columns = r.u32()? as usize;
    let mut columns = Vec::with_capacity(num_columns.min(b.len()));
    for _ in 0..num_columns {
        let at = r.pos();
        let code = r.u8()?;
        let ty = ColumnType::from_code(code)
            .ok_or_else(|| FormatError::parse(at, format!("unknown type code {code}")))?;
        let len = r.u16()? as usize;
        let at = r.pos();
        let name = std::str::from_utf8(r.take(len)?)
            .map_err(|e| FormatError::parse(at + e.valid_up_to(), "invalid utf-8 in column name"))?;
        columns.push(Column::new(name, ty));
    }
    let num_stripes = r.u32()? as usize;
    let mut stripes = Vec::with_capacity(num_stripes.min(b.len() / 40));
    for _ in 0..num_stripes {
        stripes.push(StripeInfo {
            stripe_offset: r.u64()?,
            index_len: r.u64()?,
            data_len: r.u64()?,
            footer_len: r.u64()?,
            num_rows: r.u64()?,
        });
    }
    let mut file_stats = Vec::with_capacity(columns.len());
    for c in &columns {
        file_stats.push(read_stats(&mut r, c.ty)?);
    }
    r.finish()?;
    Ok(FileFooter {
        version,
        num_rows,
        columns,
        stripes,
        file_stats,
    })
}

pub fn serialize_stripe_footer(f: &StripeFooter) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 17 * f.streams.len());
    out.extend_from_slice(&(f.streams.len() as u32).to_le_bytes());
    for s in &f.streams {
        out.extend_from_slice(&s.chunk_offset.to_le_bytes());
        out.extend_from_slice(&s.chunk_len.to_le_bytes());
        out.push(s.encoding as u8);
    }
    out
}

pub fn parse_stripe_footer(b: &[u8]) -> Result<StripeFooter, FormatError> {
    let mut r = ByteReader::new(b);
    let n = r.u32()? as usize;
    let mut streams = Vec::with_capacity(n.min(b.len() / 17));
    for _ in 0..n {
        let chunk_offset = r.u64()?;
        let chunk_len = r.u64()?;
        let at = r.pos();
        let code = r.u8()?;
        let encoding = Encoding::from_code(code)
            .ok_or_else(|| FormatError::parse(at, format!("unknown encoding {code}")))?;
        streams.push(StreamInfo {
            chunk_offset,
            chunk_len,
            encoding,
        });
    }
    r.finish()?;
    Ok(StripeFooter { streams })
}

pub fn serialize_stripe_index(ix: &StripeIndex) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&ix.num_row_groups.to_le_bytes());
    for col in &ix.columns {
        put_stats(&mut out, &col.stripe_stats);
        for rg in &col.row_groups {
            put_stats(&mut out, &rg.stats);
            out.extend_from_slice(&rg.byte_offset.to_le_bytes());
        }
    }
    out
}

/// Parses a stripe index. Column count and stat widths come from the file
/// footer's schema.
pub fn parse_stripe_index(b: &[u8], types: &[ColumnType]) -> Result<StripeIndex, FormatError> {
    let mut r = ByteReader::new(b);
    let num_row_groups = r.u32()?;
    if num_row_groups == 0 {
        return Err(FormatError::parse(0, "stripe index has zero row groups"));
    }
    let mut columns = Vec::with_capacity(types.len());
    for &ty in types {
        let stripe_stats = read_stats(&mut r, ty)?;
        let mut row_groups = Vec::with_capacity((num_row_groups as usize).min(b.len() / 17));
        for _ in 0..num_row_groups {
            let stats = read_stats(&mut r, ty)?;
            row_groups.push(RowGroupEntry {
                stats,
                byte_offset: r.u64()?,
            });
        }
        columns.push(ColumnIndex {
            stripe_stats,
            row_groups,
        });
    }
    r.finish()?;
    Ok(StripeIndex {
        num_row_groups,
        columns,
    })
}
