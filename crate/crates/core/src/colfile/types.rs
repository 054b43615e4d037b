//! Metadata sections of the file format and the read-only access traits the
//! scan engine uses, so owned objects and object-buffer views are
//! interchangeable.

use super::error::{check_index, FormatError};
use super::stats::{ColumnStats, StatsRef};
use super::value::ColumnType;
use super::{FORMAT_VERSION, MAGIC};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub ty: ColumnType,
}

impl Column {
    pub fn new(name: impl Into<String>, ty: ColumnType) -> Self {
        Column {
            name: name.into(),
            ty,
        }
    }
}

/// Location and size of one stripe. Index, data and stripe footer are laid
/// out back to back starting at `stripe_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StripeInfo {
    pub stripe_offset: u64,
    pub index_len: u64,
    pub data_len: u64,
    pub footer_len: u64,
    pub num_rows: u64,
}

impl StripeInfo {
    pub fn data_offset(&self) -> u64 {
        self.stripe_offset + self.index_len
    }

    pub fn footer_offset(&self) -> u64 {
        self.stripe_offset + self.index_len + self.data_len
    }

    pub fn end(&self) -> u64 {
        self.footer_offset() + self.footer_len
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileFooter {
    pub version: u32,
    pub num_rows: u64,
    pub columns: Vec<Column>,
    pub stripes: Vec<StripeInfo>,
    pub file_stats: Vec<ColumnStats>,
}

impl FileFooter {
    pub fn column_types(&self) -> Vec<ColumnType> {
        self.columns.iter().map(|c| c.ty).collect()
    }

    /// Checks the structural invariants, including that stripes tile the
    /// file from the leading magic up to `footer_offset`.
    pub fn validate(&self, footer_offset: u64) -> Result<(), FormatError> {
        let corrupt = |msg: String| Err(FormatError::Corrupt(msg));
        if self.version != FORMAT_VERSION {
            return corrupt(format!("unsupported version {}", self.version));
        }
        if self.columns.is_empty() {
            return corrupt("footer has no columns".into());
        }
        if self.stripes.is_empty() {
            return corrupt("footer has no stripes".into());
        }
        if self.file_stats.len() != self.columns.len() {
            return corrupt(format!(
                "{} file stats for {} columns",
                self.file_stats.len(),
                self.columns.len()
            ));
        }
        let mut expected = MAGIC.len() as u64;
        let mut rows = 0u64;
        for (i, s) in self.stripes.iter().enumerate() {
            if s.stripe_offset != expected {
                return corrupt(format!(
                    "stripe {i} starts at {} but previous section ends at {expected}",
                    s.stripe_offset
                ));
            }
            if s.num_rows == 0 {
                return corrupt(format!("stripe {i} has zero rows"));
            }
            expected = s
                .stripe_offset
                .checked_add(s.index_len)
                .and_then(|v| v.checked_add(s.data_len))
                .and_then(|v| v.checked_add(s.footer_len))
                .ok_or_else(|| FormatError::Corrupt(format!("stripe {i} length overflow")))?;
            rows += s.num_rows;
        }
        if expected != footer_offset {
            return corrupt(format!(
                "stripes end at {expected} but footer starts at {footer_offset}"
            ));
        }
        if rows != self.num_rows {
            return corrupt(format!(
                "footer claims {} rows, stripes hold {rows}",
                self.num_rows
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Encoding {
    Plain = 0,
}

impl Encoding {
    pub fn from_code(code: u8) -> Option<Self> {
        (code == 0).then_some(Encoding::Plain)
    }
}

/// Location of one column chunk, relative to the stripe's data region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamInfo {
    pub chunk_offset: u64,
    pub chunk_len: u64,
    pub encoding: Encoding,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripeFooter {
    pub streams: Vec<StreamInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowGroupEntry {
    pub stats: ColumnStats,
    /// Offset of the group's first slot within the decompressed values region.
    pub byte_offset: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnIndex {
    pub stripe_stats: ColumnStats,
    pub row_groups: Vec<RowGroupEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripeIndex {
    pub num_row_groups: u32,
    pub columns: Vec<ColumnIndex>,
}

#[derive(Debug, Clone, Copy)]
pub struct RowGroupRef<'a> {
    pub stats: StatsRef<'a>,
    pub byte_offset: u64,
}

/// Read access to a file footer.
pub trait FooterAccess {
    fn version(&self) -> u32;
    fn num_rows(&self) -> u64;
    fn num_columns(&self) -> usize;
    fn column_type(&self, col: usize) -> Result<ColumnType, FormatError>;
    fn num_stripes(&self) -> usize;
    fn stripe(&self, idx: usize) -> Result<StripeInfo, FormatError>;
    fn file_stats(&self, col: usize) -> Result<StatsRef<'_>, FormatError>;
}

/// Read access to a stripe footer.
pub trait StripeFooterAccess {
    fn num_streams(&self) -> usize;
    fn stream(&self, col: usize) -> Result<StreamInfo, FormatError>;
}

/// Read access to a stripe index.
pub trait StripeIndexAccess {
    fn num_columns(&self) -> usize;
    fn num_row_groups(&self) -> usize;
    fn stripe_stats(&self, col: usize) -> Result<StatsRef<'_>, FormatError>;
    fn row_group(&self, col: usize, group: usize) -> Result<RowGroupRef<'_>, FormatError>;
}

impl FooterAccess for FileFooter {
    fn version(&self) -> u32 {
        self.version
    }

    fn num_rows(&self) -> u64 {
        self.num_rows
    }

    fn num_columns(&self) -> usize {
        self.columns.len()
    }

    fn column_type(&self, col: usize) -> Result<ColumnType, FormatError> {
        check_index("column", col, self.columns.len())?;
        Ok(self.columns[col].ty)
    }

    fn num_stripes(&self) -> usize {
        self.stripes.len()
    }

    fn stripe(&self, idx: usize) -> Result<StripeInfo, FormatError> {
        check_index("stripe", idx, self.stripes.len())?;
        Ok(self.stripes[idx])
    }

    fn file_stats(&self, col: usize) -> Result<StatsRef<'_>, FormatError> {
        check_index("column", col, self.file_stats.len())?;
        Ok(self.file_stats[col].as_stats_ref())
    }
}

impl StripeFooterAccess for StripeFooter {
    fn num_streams(&self) -> usize {
        self.streams.len()
    }

    fn stream(&self, col: usize) -> Result<StreamInfo, FormatError> {
        check_index("stream", col, self.streams.len())?;
        Ok(self.streams[col])
    }
}

impl StripeIndexAccess for StripeIndex {
    fn num_columns(&self) -> usize {
        self.columns.len()
    }

    fn num_row_groups(&self) -> usize {
        self.num_row_groups as usize
    }

    fn stripe_stats(&self, col: usize) -> Result<StatsRef<'_>, FormatError> {
        check_index("column", col, self.columns.len())?;
        Ok(self.columns[col].stripe_stats.as_stats_ref())
    }

    fn row_group(&self, col: usize, group: usize) -> Result<RowGroupRef<'_>, FormatError> {
        check_index("column", col, self.columns.len())?;
        let groups = &self.columns[col].row_groups;
        check_index("row group", group, groups.len())?;
        Ok(RowGroupRef {
            stats: groups[group].stats.as_stats_ref(),
            byte_offset: groups[group].byte_offset,
        })
    }
}

/// Rows covered by `group` in a stripe of `stripe_rows` rows.
pub fn row_group_rows(stripe_rows: u64, group: usize) -> u64 {
    let start = group as u64 * super::ROW_GROUP_ROWS;
    stripe_rows.saturating_sub(start).min(super::ROW_GROUP_ROWS)
}

pub fn num_row_groups(stripe_rows: u64) -> u64 {
    stripe_rows.div_ceil(super::ROW_GROUP_ROWS)
}
