use super::chunk::put_slot;
use super::codec::{serialize_footer, serialize_stripe_footer, serialize_stripe_index};
use super::compress::{deflate_section_with_level, DEFAULT_LEVEL};
use super::error::FormatError;
use super::stats::{ColumnStats, StatsBuilder};
use super::types::{
    Column, ColumnIndex, Encoding, FileFooter, RowGroupEntry, StreamInfo, StripeFooter,
    StripeIndex, StripeInfo,
};
use super::value::Value;
use super::{FORMAT_VERSION, MAGIC, ROW_GROUP_ROWS};

/// One row; `None` is a null cell.
pub type Row = Vec<Option<Value>>;

#[derive(Debug, Clone, Copy)]
pub struct WriteOptions {
    pub stripe_rows: usize,
    pub compression_level: u8,
}

impl Default for WriteOptions {
    fn default() -> Self {
        WriteOptions {
            stripe_rows: 10_000,
            compression_level: DEFAULT_LEVEL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct WrittenFile {
    pub bytes: Vec<u8>,
    pub footer: FileFooter,
}

pub fn write_file(schema: &[Column], rows: &[Row], stripe_rows: usize) -> Result<WrittenFile, FormatError> {
    write_file_with(
        schema,
        rows,
        &WriteOptions {
            stripe_rows,
            ..WriteOptions::default()
        },
    )
}

pub fn write_file_with(
    schema: &[Column],
    rows: &[Row],
    options: &WriteOptions,
) -> Result<WrittenFile, FormatError> {
    if schema.is_empty() {
        return Err(FormatError::Schema("schema has no columns".into()));
    }
    if options.stripe_rows == 0 {
        return Err(FormatError::Schema("stripe_rows must be at least 1".into()));
    }
    if rows.is_empty() {
        return Err(FormatError::EmptyInput("no rows to write"));
    }
    for c in schema {
        if c.name.len() > u16::MAX as usize {
            return Err(FormatError::Schema(format!("column name of {} bytes", c.name.len())));
        }
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != schema.len() {
            return Err(FormatError::Schema(format!(
                "row {i} has {} cells, schema has {} columns",
                row.len(),
                schema.len()
            )));
        }
        for (cell, col) in row.iter().zip(schema) {
            if let Some(v) = cell {
                if v.column_type() != col.ty {
                    return Err(FormatError::Schema(format!(
                        "row {i} column {:?}: expected {}, got {}",
                        col.name,
                        col.ty,
                        v.column_type()
                    )));
                }
            }
        }
    }

    let level = options.compression_level;
    let mut out = MAGIC.to_vec();
    let mut stripes = Vec::new();
    let mut file_stats = vec![ColumnStats::empty(); schema.len()];

    for stripe in rows.chunks(options.stripe_rows) {
        let stripe_offset = out.len() as u64;
        let mut index_columns = Vec::with_capacity(schema.len());
        let mut data = Vec::new();
        let mut streams = Vec::with_capacity(schema.len());

        for (ci, col) in schema.iter().enumerate() {
            let mut chunk = vec![0u8; stripe.len().div_ceil(8)];
            let bitmap_len = chunk.len();
            let mut row_groups = Vec::new();
            let mut stripe_stats = ColumnStats::empty();
            for (gi, group) in stripe.chunks(ROW_GROUP_ROWS as usize).enumerate() {
                let byte_offset = (chunk.len() - bitmap_len) as u64;
                let mut builder = StatsBuilder::new(col.ty);
                for (ri, row) in group.iter().enumerate() {
                    let cell = row[ci].as_ref().map(Value::as_ref);
                    if cell.is_some() {
                        let r = gi * ROW_GROUP_ROWS as usize + ri;
                        chunk[r / 8] |= 1 << (r % 8);
                    }
                    builder.push(cell);
                    put_slot(&mut chunk, col.ty, cell);
                }
                let stats = builder.finish();
                stripe_stats.merge(&stats);
                row_groups.push(RowGroupEntry { stats, byte_offset });
            }
            file_stats[ci].merge(&stripe_stats);
            index_columns.push(ColumnIndex {
                stripe_stats,
                row_groups,
            });

            let compressed = deflate_section_with_level(&chunk, level);
            streams.push(StreamInfo {
                chunk_offset: data.len() as u64,
                chunk_len: compressed.len() as u64,
                encoding: Encoding::Plain,
            });
            data.extend_from_slice(&compressed);
        }

        let index = StripeIndex {
            num_row_groups: stripe.len().div_ceil(ROW_GROUP_ROWS as usize) as u32,
            columns: index_columns,
        };
        let index_bytes = deflate_section_with_level(&serialize_stripe_index(&index), level);
        let footer_bytes =
            deflate_section_with_level(&serialize_stripe_footer(&StripeFooter { streams }), level);

        out.extend_from_slice(&index_bytes);
        out.extend_from_slice(&data);
        out.extend_from_slice(&footer_bytes);
        stripes.push(StripeInfo {
            stripe_offset,
            index_len: index_bytes.len() as u64,
            data_len: data.len() as u64,
            footer_len: footer_bytes.len() as u64,
            num_rows: stripe.len() as u64,
        });
    }

    let footer = FileFooter {
        version: FORMAT_VERSION,
        num_rows: rows.len() as u64,
        columns: schema.to_vec(),
        stripes,
        file_stats,
    };
    let compressed = deflate_section_with_level(&serialize_footer(&footer), level);
    let footer_len = u32::try_from(compressed.len())
        .map_err(|_| FormatError::Schema("file footer exceeds 4 GiB".into()))?;
    out.extend_from_slice(&compressed);
    out.extend_from_slice(&footer_len.to_le_bytes());
    out.extend_from_slice(MAGIC);
    Ok(WrittenFile { bytes: out, footer })
}
