//! Conjunctive predicates and their min/max pushdown test.

use std::cmp::Ordering;
use std::fmt;

use crate::colfile::{ColumnType, StatsRef, Value, ValueRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt, CmpOp::Ne];

    /// Whether `ord` (value compared to literal) satisfies the operator.
    /// An unordered comparison (NaN) satisfies only `Ne`.
    pub fn holds(self, ord: Option<Ordering>) -> bool {
        match ord {
            None => self == CmpOp::Ne,
            Some(o) => match self {
                CmpOp::Lt => o == Ordering::Less,
                CmpOp::Le => o != Ordering::Greater,
                CmpOp::Eq => o == Ordering::Equal,
                CmpOp::Ge => o != Ordering::Less,
                CmpOp::Gt => o == Ordering::Greater,
                CmpOp::Ne => o != Ordering::Equal,
            },
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Ne => "!=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub column: usize,
    pub op: CmpOp,
    pub literal: Value,
}

impl Atom {
    pub fn new(column: usize, op: CmpOp, literal: impl Into<Value>) -> Self {
        Atom {
            column,
            op,
            literal: literal.into(),
        }
    }

    /// Row-level test. Null never matches.
    pub fn matches(&self, v: Option<ValueRef<'_>>) -> bool {
        v.is_some_and(|v| self.op.holds(v.compare(&self.literal.as_ref())))
    }
}

/// A conjunction of atoms; empty means always true.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Predicate {
    pub atoms: Vec<Atom>,
}

impl Predicate {
    pub fn always() -> Self {
        Predicate::default()
    }

    pub fn new(atoms: Vec<Atom>) -> Self {
        Predicate { atoms }
    }

    pub fn and(mut self, atom: Atom) -> Self {
        self.atoms.push(atom);
        self
    }

    pub fn columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.atoms.iter().map(|a| a.column)
    }

    /// Checks column ordinals and literal types against a schema.
    pub fn check(&self, types: &[ColumnType]) -> Result<(), String> {
        for a in &self.atoms {
            let Some(ty) = types.get(a.column) else {
                return Err(format!("predicate column {} out of range ({} columns)", a.column, types.len()));
            };
            if a.literal.column_type() != *ty {
                return Err(format!(
                    "literal {} for column {} is {:?}, column is {:?}",
                    a.literal,
                    a.column,
                    a.literal.column_type(),
                    ty
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" and ")?;
            }
            write!(f, "c{} {} {}", a.column, a.op, a.literal)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pushdown {
    MustSkip,
    MayMatch,
}

/// Whether stats prove no row of a `rows`-row range satisfies `atom`.
pub fn eval_atom(atom: &Atom, stats: &StatsRef<'_>, rows: u64) -> Pushdown {
    if stats.null_count >= rows {
        return Pushdown::MustSkip;
    }
    let Some((lo, hi)) = &stats.minmax else {
        return Pushdown::MayMatch;
    };
    let lit = atom.literal.as_ref();
    let lo_vs = lo.compare(&lit);
    let hi_vs = hi.compare(&lit);
    let skip = match atom.op {
        CmpOp::Lt => lo_vs.is_some_and(Ordering::is_ge),
        CmpOp::Le => lo_vs.is_some_and(Ordering::is_gt),
        CmpOp::Gt => hi_vs.is_some_and(Ordering::is_le),
        CmpOp::Ge => hi_vs.is_some_and(Ordering::is_lt),
        CmpOp::Eq => lo_vs.is_some_and(Ordering::is_gt) || hi_vs.is_some_and(Ordering::is_lt),
        CmpOp::Ne => false,
    };
    if skip {
        Pushdown::MustSkip
    } else {
        Pushdown::MayMatch
    }
}

/// Conjunction over per-column stats: one provably-false atom skips the range.
pub fn eval_pushdown<'a, F>(p: &Predicate, mut stats_of: F, rows: u64) -> Pushdown
where
    F: FnMut(usize) -> StatsRef<'a>,
{
    if p.atoms.iter().any(|a| eval_atom(a, &stats_of(a.column), rows) == Pushdown::MustSkip) {
        Pushdown::MustSkip
    } else {
        Pushdown::MayMatch
    }
}
