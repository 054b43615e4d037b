//! Decompressed column chunk layout: a null bitmap followed by one value slot
//! per row.

use super::error::FormatError;
use super::value::{ColumnType, Value, ValueRef};

/// Appends the slot for `value` to `out`. Null rows get a zeroed slot.
pub(crate) fn put_slot(out: &mut Vec<u8>, ty: ColumnType, value: Option<ValueRef<'_>>) {
    match (ty, value) {
        (ColumnType::Int64, Some(ValueRef::Int64(v))) => out.extend_from_slice(&v.to_le_bytes()),
        (ColumnType::Float64, Some(ValueRef::Float64(v))) => {
            out.extend_from_slice(&v.to_bits().to_le_bytes())
        }
        (ColumnType::Utf8, Some(ValueRef::Utf8(b))) => {
            out.extend_from_slice(&(b.len() as u32).to_le_bytes());
            out.extend_from_slice(b);
        }
        (ColumnType::Utf8, None) => out.extend_from_slice(&[0; 4]),
        (_, None) => out.extend_from_slice(&[0; 8]),
        (ty, Some(v)) => panic!("slot type mismatch: column {ty}, value {:?}", v.column_type()),
    }
}

/// A decompressed column chunk for one stripe.
#[derive(Debug, Clone)]
pub struct ColumnChunk {
    ty: ColumnType,
    num_rows: usize,
    bytes: Vec<u8>,
}

impl ColumnChunk {
    /// Validates the layout of a decompressed chunk holding `num_rows` rows.
    pub fn parse(bytes: Vec<u8>, ty: ColumnType, num_rows: usize) -> Result<Self, FormatError> {
        let bitmap_len = num_rows.div_ceil(8);
        if bytes.len() < bitmap_len {
            return Err(FormatError::Corrupt(format!(
                "chunk of {} bytes cannot hold a {bitmap_len}-byte null bitmap",
                bytes.len()
            )));
        }
        let values_len = bytes.len() - bitmap_len;
        match ty {
            ColumnType::Int64 | ColumnType::Float64 => {
                if values_len != num_rows * 8 {
                    return Err(FormatError::Corrupt(format!(
                        "fixed-width chunk has {values_len} value bytes for {num_rows} rows"
                    )));
                }
            }
            ColumnType::Utf8 => {
                let values = &bytes[bitmap_len..];
                let mut pos = 0usize;
                for row in 0..num_rows {
                    let len = read_len(values, pos).ok_or_else(|| {
                        FormatError::Corrupt(format!("string slot {row} truncated"))
                    })?;
                    pos += 4 + len;
                    if pos > values.len() {
                        return Err(FormatError::Corrupt(format!("string slot {row} overruns chunk")));
                    }
                }
                if pos != values.len() {
                    return Err(FormatError::Corrupt(format!(
                        "{} bytes after last string slot",
                        values.len() - pos
                    )));
                }
            }
        }
        Ok(ColumnChunk {
            ty,
            num_rows,
            bytes,
        })
    }

    pub fn column_type(&self) -> ColumnType {
        self.ty
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn null_bitmap(&self) -> &[u8] {
        &self.bytes[..self.num_rows.div_ceil(8)]
    }

    /// The values region; row-group byte offsets are relative to its start.
    pub fn values_region(&self) -> &[u8] {
        &self.bytes[self.num_rows.div_ceil(8)..]
    }

    pub fn is_valid(&self, row: usize) -> bool {
        self.null_bitmap()[row / 8] & (1 << (row % 8)) != 0
    }

    /// Decodes `count` rows starting at `first_row`, whose first slot begins
    /// at `byte_offset` in the values region.
    pub fn decode_range(
        &self,
        byte_offset: u64,
        first_row: usize,
        count: usize,
    ) -> Result<Vec<Option<ValueRef<'_>>>, FormatError> {
        if first_row + count > self.num_rows {
            return Err(FormatError::Corrupt(format!(
                "rows {first_row}..{} exceed chunk of {} rows",
                first_row + count,
                self.num_rows
            )));
        }
        let values = self.values_region();
        let mut pos = usize::try_from(byte_offset)
            .map_err(|_| FormatError::Corrupt("row group offset overflows".into()))?;
        let mut out = Vec::with_capacity(count);
        for row in first_row..first_row + count {
            let (slot_len, v) = match self.ty {
                ColumnType::Int64 => {
                    let raw = read_u64(values, pos).ok_or_else(|| bad_offset(byte_offset))?;
                    (8, ValueRef::Int64(raw as i64))
                }
                ColumnType::Float64 => {
                    let raw = read_u64(values, pos).ok_or_else(|| bad_offset(byte_offset))?;
                    (8, ValueRef::Float64(f64::from_bits(raw)))
                }
                ColumnType::Utf8 => {
                    let len = read_len(values, pos).ok_or_else(|| bad_offset(byte_offset))?;
                    let s = values
                        .get(pos + 4..pos + 4 + len)
                        .ok_or_else(|| bad_offset(byte_offset))?;
                    (4 + len, ValueRef::Utf8(s))
                }
            };
            pos += slot_len;
            out.push(self.is_valid(row).then_some(v));
        }
        Ok(out)
    }

    /// Decodes every row into owned values.
    pub fn to_values(&self) -> Result<Vec<Option<Value>>, FormatError> {
        self.decode_range(0, 0, self.num_rows)?
            .into_iter()
            .map(|v| {
                v.map(|v| v.to_value())
                    .transpose()
                    .map_err(|e| FormatError::Corrupt(format!("invalid utf-8 in string value: {e}")))
            })
            .collect()
    }
}

fn bad_offset(byte_offset: u64) -> FormatError {
    FormatError::Corrupt(format!("row group byte offset {byte_offset} does not address a slot"))
}

fn read_u64(buf: &[u8], pos: usize) -> Option<u64> {
    buf.get(pos..pos + 8)
        .map(|b| u64::from_le_bytes(b.try_into().unwrap()))
}

fn read_len(buf: &[u8], pos: usize) -> Option<usize> {
    buf.get(pos..pos + 4)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()) as usize)
}
