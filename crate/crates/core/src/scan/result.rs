//! Aggregates and scan results.

use std::cmp::Ordering;
use std::fmt;

use crate::colfile::{ColumnType, Value, ValueRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregate {
    /// Matching rows.
    Count,
    /// Sum of non-null values; NaN propagates.
    Sum(usize),
    /// Smallest non-null, non-NaN value.
    Min(usize),
    Max(usize),
}

impl Aggregate {
    pub fn column(&self) -> Option<usize> {
        match *self {
            Aggregate::Count => None,
            Aggregate::Sum(c) | Aggregate::Min(c) | Aggregate::Max(c) => Some(c),
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Aggregate::Count => f.write_str("count(*)"),
            Aggregate::Sum(c) => write!(f, "sum(c{c})"),
            Aggregate::Min(c) => write!(f, "min(c{c})"),
            Aggregate::Max(c) => write!(f, "max(c{c})"),
        }
    }
}

/// Aggregate state and final value. Float sums are added in row order
/// within a split and in split order across splits.
#[derive(Debug, Clone)]
pub enum AggValue {
    Count(u64),
    SumInt(i128),
    SumFloat(f64),
    Min(Option<Value>),
    Max(Option<Value>),
}

impl PartialEq for AggValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (AggValue::Count(a), AggValue::Count(b)) => a == b,
            (AggValue::SumInt(a), AggValue::SumInt(b)) => a == b,
            (AggValue::SumFloat(a), AggValue::SumFloat(b)) => a.to_bits() == b.to_bits(),
            (AggValue::Min(a), AggValue::Min(b)) | (AggValue::Max(a), AggValue::Max(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for AggValue {}

impl fmt::Display for AggValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggValue::Count(n) => write!(f, "{n}"),
            AggValue::SumInt(n) => write!(f, "{n}"),
            AggValue::SumFloat(x) => write!(f, "{x}"),
            AggValue::Min(v) | AggValue::Max(v) => match v {
                Some(v) => write!(f, "{v}"),
                None => f.write_str("null"),
            },
        }
    }
}

fn replaces(candidate: &ValueRef<'_>, current: &Option<Value>, want: Ordering) -> bool {
    match candidate {
        ValueRef::Float64(x) if x.is_nan() => false,
        _ => current
            .as_ref()
            .is_none_or(|cur| candidate.compare(&cur.as_ref()) == Some(want)),
    }
}

impl AggValue {
    pub fn initial(agg: Aggregate, types: &[ColumnType]) -> Self {
        match agg {
            Aggregate::Count => AggValue::Count(0),
            Aggregate::Sum(c) => match types.get(c) {
                Some(ColumnType::Float64) => AggValue::SumFloat(0.0),
                _ => AggValue::SumInt(0),
            },
            Aggregate::Min(_) => AggValue::Min(None),
            Aggregate::Max(_) => AggValue::Max(None),
        }
    }

    /// Folds one matching row; `v` is the aggregate column's value.
    pub fn add_row(&mut self, v: Option<ValueRef<'_>>) -> Result<(), std::str::Utf8Error> {
        match (self, v) {
            (AggValue::Count(n), _) => *n += 1,
            (_, None) => {}
            (AggValue::SumInt(s), Some(ValueRef::Int64(x))) => *s += i128::from(x),
            (AggValue::SumFloat(s), Some(ValueRef::Float64(x))) => *s += x,
            (AggValue::Min(cur), Some(v)) => {
                if replaces(&v, cur, Ordering::Less) {
                    *cur = Some(v.to_value()?);
                }
            }
            (AggValue::Max(cur), Some(v)) => {
                if replaces(&v, cur, Ordering::Greater) {
                    *cur = Some(v.to_value()?);
                }
            }
            (_, Some(_)) => {}
        }
        Ok(())
    }

    /// Combines with the value of a later split.
    pub fn merge(&mut self, later: &AggValue) {
        match (self, later) {
            (AggValue::Count(a), AggValue::Count(b)) => *a += b,
            (AggValue::SumInt(a), AggValue::SumInt(b)) => *a += b,
            (AggValue::SumFloat(a), AggValue::SumFloat(b)) => *a += b,
            (AggValue::Min(a), AggValue::Min(Some(b))) => {
                if replaces(&b.as_ref(), a, Ordering::Less) {
                    *a = Some(b.clone());
                }
            }
            (AggValue::Max(a), AggValue::Max(Some(b))) => {
                if replaces(&b.as_ref(), a, Ordering::Greater) {
                    *a = Some(b.clone());
                }
            }
            (AggValue::Min(_) | AggValue::Max(_), _) => {}
            (a, b) => panic!("merging mismatched aggregates {a:?} and {b:?}"),
        }
    }
}

/// Result of scanning one or more splits. Every visited row group is
/// counted as either scanned or skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanResult {
    pub value: AggValue,
    pub rows_scanned: u64,
    pub rows_matched: u64,
    pub row_groups_scanned: u64,
    pub row_groups_skipped: u64,
    pub stripes_skipped: u64,
}

impl ScanResult {
    pub fn empty(agg: Aggregate, types: &[ColumnType]) -> Self {
        ScanResult {
            value: AggValue::initial(agg, types),
            rows_scanned: 0,
            rows_matched: 0,
            row_groups_scanned: 0,
            row_groups_skipped: 0,
            stripes_skipped: 0,
        }
    }

    pub fn merge(&mut self, later: &ScanResult) {
        self.value.merge(&later.value);
        self.rows_scanned += later.rows_scanned;
        self.rows_matched += later.rows_matched;
        self.row_groups_scanned += later.row_groups_scanned;
        self.row_groups_skipped += later.row_groups_skipped;
        self.stripes_skipped += later.stripes_skipped;
    }
}
