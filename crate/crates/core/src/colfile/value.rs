//! Typed scalar values and their borrowed counterparts.

use std::cmp::Ordering;
use std::fmt;

/// Physical type of a column. Serialized as a single byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum ColumnType {
    Int64 = 0,
    Float64 = 1,
    Utf8 = 2,
}

impl ColumnType {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(ColumnType::Int64),
            1 => Some(ColumnType::Float64),
            2 => Some(ColumnType::Utf8),
            _ => None,
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, ColumnType::Int64 | ColumnType::Float64)
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnType::Int64 => f.write_str("int64"),
            ColumnType::Float64 => f.write_str("float64"),
            ColumnType::Utf8 => f.write_str("utf8"),
        }
    }
}

/// An owned, non-null cell value.
///
/// Equality is bitwise for floats, so `NaN == NaN` and `0.0 != -0.0`. That is
/// the notion round trips need; ordering for predicates lives on [`ValueRef`].
#[derive(Debug, Clone)]
pub enum Value {
    Int64(i64),
    Float64(f64),
    Utf8(String),
}

impl Value {
    pub fn column_type(&self) -> ColumnType {
        match self {
            Value::Int64(_) => ColumnType::Int64,
            Value::Float64(_) => ColumnType::Float64,
            Value::Utf8(_) => ColumnType::Utf8,
        }
    }

    pub fn as_ref(&self) -> ValueRef<'_> {
        match self {
            Value::Int64(v) => ValueRef::Int64(*v),
            Value::Float64(v) => ValueRef::Float64(*v),
            Value::Utf8(s) => ValueRef::Utf8(s.as_bytes()),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int64(a), Value::Int64(b)) => a == b,
            (Value::Float64(a), Value::Float64(b)) => a.to_bits() == b.to_bits(),
            (Value::Utf8(a), Value::Utf8(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int64(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float64(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Utf8(v.to_owned())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int64(v) => write!(f, "{v}"),
            Value::Float64(v) => write!(f, "{v}"),
            Value::Utf8(s) => write!(f, "{s:?}"),
        }
    }
}

/// A borrowed value. Strings are raw bytes so views over cached buffers can
/// hand them out without validation or copying.
#[derive(Debug, Clone, Copy)]
pub enum ValueRef<'a> {
    Int64(i64),
    Float64(f64),
    Utf8(&'a [u8]),
}

impl<'a> ValueRef<'a> {
    pub fn column_type(&self) -> ColumnType {
        match self {
            ValueRef::Int64(_) => ColumnType::Int64,
            ValueRef::Float64(_) => ColumnType::Float64,
            ValueRef::Utf8(_) => ColumnType::Utf8,
        }
    }

    /// Ordering used by statistics and predicates: signed for Int64, IEEE
    /// partial order for Float64, unsigned bytewise for Utf8. `None` for
    /// mismatched types or when a NaN is involved.
    pub fn compare(&self, other: &ValueRef<'_>) -> Option<Ordering> {
        match (self, other) {
            (ValueRef::Int64(a), ValueRef::Int64(b)) => Some(a.cmp(b)),
            (ValueRef::Float64(a), ValueRef::Float64(b)) => a.partial_cmp(b),
            (ValueRef::Utf8(a), ValueRef::Utf8(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    /// Converts to an owned value; fails only on non-UTF-8 string bytes.
    pub fn to_value(&self) -> Result<Value, std::str::Utf8Error> {
        Ok(match *self {
            ValueRef::Int64(v) => Value::Int64(v),
            ValueRef::Float64(v) => Value::Float64(v),
            ValueRef::Utf8(b) => Value::Utf8(std::str::from_utf8(b)?.to_owned()),
        })
    }

    /// Bitwise identity, matching `Value`'s equality.
    pub fn same_as(&self, other: &ValueRef<'_>) -> bool {
        match (self, other) {
            (ValueRef::Int64(a), ValueRef::Int64(b)) => a == b,
            (ValueRef::Float64(a), ValueRef::Float64(b)) => a.to_bits() == b.to_bits(),
            (ValueRef::Utf8(a), ValueRef::Utf8(b)) => a == b,
            _ => false,
        }
    }
}
