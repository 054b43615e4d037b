//! Min/max/null-count statistics over column ranges.

use std::cmp::Ordering;

use super::value::{ColumnType, Value, ValueRef};

/// Statistics for a contiguous range of rows in one column.
///
/// `minmax` is `None` when the range holds no orderable value (all null, or
/// only NaN floats). Float NaN never appears as a bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnStats {
    pub minmax: Option<(Value, Value)>,
    pub null_count: u64,
}

impl ColumnStats {
    pub fn empty() -> Self {
        ColumnStats {
            minmax: None,
            null_count: 0,
        }
    }

    pub fn has_minmax(&self) -> bool {
        self.minmax.is_some()
    }

    pub fn as_stats_ref(&self) -> StatsRef<'_> {
        StatsRef {
            minmax: self.minmax.as_ref().map(|(lo, hi)| (lo.as_ref(), hi.as_ref())),
            null_count: self.null_count,
        }
    }

    /// Folds `other` into `self`: min of mins, max of maxes, sum of null counts.
    pub fn merge(&mut self, other: &ColumnStats) {
        self.null_count += other.null_count;
        let Some((olo, ohi)) = &other.minmax else {
            return;
        };
        match &mut self.minmax {
            None => self.minmax = Some((olo.clone(), ohi.clone())),
            Some((lo, hi)) => {
                if olo.as_ref().compare(&lo.as_ref()) == Some(Ordering::Less) {
                    *lo = olo.clone();
                }
                if ohi.as_ref().compare(&hi.as_ref()) == Some(Ordering::Greater) {
                    *hi = ohi.clone();
                }
            }
        }
    }
}

/// Borrowed statistics, produced both by owned metadata and by object-buffer
/// views without materializing strings.
#[derive(Debug, Clone, Copy)]
pub struct StatsRef<'a> {
    pub minmax: Option<(ValueRef<'a>, ValueRef<'a>)>,
    pub null_count: u64,
}

impl StatsRef<'_> {
    pub fn to_stats(&self) -> Result<ColumnStats, std::str::Utf8Error> {
        let minmax = match self.minmax {
            Some((lo, hi)) => Some((lo.to_value()?, hi.to_value()?)),
            None => None,
        };
        Ok(ColumnStats {
            minmax,
            null_count: self.null_count,
        })
    }
}

/// Incremental statistics accumulator.
#[derive(Debug)]
pub struct StatsBuilder<'a> {
    ty: ColumnType,
    min: Option<ValueRef<'a>>,
    max: Option<ValueRef<'a>>,
    null_count: u64,
}

impl<'a> StatsBuilder<'a> {
    pub fn new(ty: ColumnType) -> Self {
        StatsBuilder {
            ty,
            min: None,
            max: None,
            null_count: 0,
        }
    }

    pub fn push(&mut self, value: Option<ValueRef<'a>>) {
        let Some(v) = value else {
            self.null_count += 1;
            return;
        };
        debug_assert_eq!(v.column_type(), self.ty);
        if let ValueRef::Float64(f) = v {
            if f.is_nan() {
                return;
            }
        }
        match self.min {
            Some(m) if v.compare(&m) != Some(Ordering::Less) => {}
            _ => self.min = Some(v),
        }
        match self.max {
            Some(m) if v.compare(&m) != Some(Ordering::Greater) => {}
            _ => self.max = Some(v),
        }
    }

    pub fn finish(self) -> ColumnStats {
        let minmax = match (self.min, self.max) {
            (Some(lo), Some(hi)) => Some((
                lo.to_value().expect("stats built from valid strings"),
                hi.to_value().expect("stats built from valid strings"),
            )),
            _ => None,
        };
        ColumnStats {
            minmax,
            null_count: self.null_count,
        }
    }
}

/// Computes statistics over a typed column slice with nulls.
pub fn compute_stats(ty: ColumnType, values: &[Option<Value>]) -> ColumnStats {
    let mut builder = StatsBuilder::new(ty);
    for v in values {
        builder.push(v.as_ref().map(Value::as_ref));
    }
    builder.finish()
}
