//! The named benchmark workloads.
//!
//! - W1: `count(*) where c0 < 100000` (about 10% of uniform c0 values).
//! - W2: `sum(c0) where c0 >= 250000 and c0 < 750000`.
//! - W3: `max(last column)` with no filter, a full unselective scan.

use std::fmt;
use std::str::FromStr;

use stripecache::colfile::ColumnType;
use stripecache::scan::{Aggregate, Atom, CmpOp, Predicate};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Workload {
    W1,
    W2,
    W3,
}

impl Workload {
    pub const ALL: [Workload; 3] = [Workload::W1, Workload::W2, Workload::W3];

    pub fn query(self, types: &[ColumnType]) -> Result<(Predicate, Aggregate), BenchError> {
        let needs_int_c0 = || {
            if types.first() == Some(&ColumnType::Int64) {
                Ok(())
            } else {
                Err(BenchError::Usage(format!("workload {self} needs an Int64 first column")))
            }
        };
        match self {
            Workload::W1 => {
                needs_int_c0()?;
                Ok((Predicate::always().and(Atom::new(0, CmpOp::Lt, 100_000i64)), Aggregate::Count))
            }
            Workload::W2 => {
                needs_int_c0()?;
                let p = Predicate::always()
                    .and(Atom::new(0, CmpOp::Ge, 250_000i64))
                    .and(Atom::new(0, CmpOp::Lt, 750_000i64));
                Ok((p, Aggregate::Sum(0)))
            }
            Workload::W3 => {
                if types.is_empty() {
                    return Err(BenchError::Usage("workload W3 needs at least one column".into()));
                }
                Ok((Predicate::always(), Aggregate::Max(types.len() - 1)))
            }
        }
    }
}

impl FromStr for Workload {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "W1" => Ok(Workload::W1),
            "W2" => Ok(Workload::W2),
            "W3" => Ok(Workload::W3),
            _ => Err(BenchError::Usage(format!("unknown workload {s:?} (expected W1, W2 or W3)"))),
        }
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}
