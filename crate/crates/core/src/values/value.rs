//! Runtime values.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::lang::format_rational;

/// A runtime value. Reals are exact and never integral: arithmetic that
/// produces a whole number yields [`Value::Int`], so numeric equality is
/// structural equality.
#[derive(Clone, Debug)]
pub enum Value {
    Nil,
    Bool(bool),
    Int(BigInt),
    Real(BigRational),
    Char(char),
    Quote(String),
    Seq(Vec<Value>),
    Set(BTreeSet<Value>),
    Map(BTreeMap<Value, Value>),
    Tuple(Vec<Value>),
    Record(String, Vec<Value>),
}

impl Value {
    pub fn int(i: impl Into<BigInt>) -> Value {
        Value::Int(i.into())
    }

    /// Normalises integral rationals to `Int`.
    pub fn number(r: BigRational) -> Value {
        if r.is_integer() {
            Value::Int(r.to_integer())
        } else {
            Value::Real(r)
        }
    }

    pub fn set(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Set(items.into_iter().collect())
    }

    pub fn seq(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Seq(items.into_iter().collect())
    }

    pub fn string(s: &str) -> Value {
        Value::Seq(s.chars().map(Value::Char).collect())
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_usize(&self) -> Option<usize> {
        self.as_int().and_then(|i| i.to_usize())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Value::Int(i) => Some(BigRational::from_integer(i.clone())),
            Value::Real(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn is_number(&self) -> bool {
        matches!(self, Value::Int(_) | Value::Real(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Int(i) => i.is_zero(),
            Value::Real(r) => r.is_zero(),
            _ => false,
        }
    }

    /// A short description of the kind of value, for error messages.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Nil => "nil",
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Real(_) => "real",
            Value::Char(_) => "char",
            Value::Quote(_) => "quote",
            Value::Seq(_) => "seq",
            Value::Set(_) => "set",
            Value::Map(_) => "map",
            Value::Tuple(_) => "tuple",
            Value::Record(..) => "record",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Nil => 0,
            Value::Bool(_) => 1,
            Value::Int(_) | Value::Real(_) => 2,
            Value::Char(_) => 3,
            Value::Quote(_) => 4,
            Value::Seq(_) => 5,
            Value::Set(_) => 6,
            Value::Map(_) => 7,
            Value::Tuple(_) => 8,
            Value::Record(..) => 9,
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        use Value::*;
        match (self, other) {
            (Bool(a), Bool(b)) => a.cmp(b),
            (Int(a), Int(b)) => a.cmp(b),
            (Int(_) | Real(_), Int(_) | Real(_)) => {
                let a = self.as_rational().unwrap_or_default();
                let b = other.as_rational().unwrap_or_default();
                a.cmp(&b)
            }
            (Char(a), Char(b)) => a.cmp(b),
            (Quote(a), Quote(b)) => a.cmp(b),
            (Seq(a), Seq(b)) | (Tuple(a), Tuple(b)) => a.cmp(b),
            (Set(a), Set(b)) => a.cmp(b),
            (Map(a), Map(b)) => a.cmp(b),
            (Record(n, a), Record(m, b)) => n.cmp(m).then_with(|| a.cmp(b)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl std::hash::Hash for Value {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Nil => {}
            Value::Bool(b) => b.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Real(r) => r.hash(state),
            Value::Char(c) => c.hash(state),
            Value::Quote(q) => q.hash(state),
            Value::Seq(vs) | Value::Tuple(vs) => vs.hash(state),
            Value::Set(s) => s.iter().for_each(|v| v.hash(state)),
            Value::Map(m) => m.iter().for_each(|(k, v)| {
                k.hash(state);
                v.hash(state);
            }),
            Value::Record(n, vs) => {
                n.hash(state);
                vs.hash(state);
            }
        }
    }
}

fn write_list<'a>(f: &mut fmt::Formatter<'_>, items: impl Iterator<Item = &'a Value>) -> fmt::Result {
    for (i, v) in items.enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nil => f.write_str("nil"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => f.write_str(&format_rational(r)),
            Value::Char(c) => write!(f, "'{c}'"),
            Value::Quote(q) => write!(f, "<{q}>"),
            Value::Seq(vs) if !vs.is_empty() && vs.iter().all(|v| matches!(v, Value::Char(_))) => {
                let s: String = vs
                    .iter()
                    .filter_map(|v| match v {
                        Value::Char(c) => Some(*c),
                        _ => None,
                    })
                    .collect();
                write!(f, "{s:?}")
            }
            Value::Seq(vs) => {
                f.write_str("[")?;
                write_list(f, vs.iter())?;
                f.write_str("]")
            }
            Value::Set(s) => {
                f.write_str("{")?;
                write_list(f, s.iter())?;
                f.write_str("}")
            }
            Value::Map(m) if m.is_empty() => f.write_str("{|->}"),
            Value::Map(m) => {
                f.write_str("{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k} |-> {v}")?;
                }
                f.write_str("}")
            }
            Value::Tuple(vs) => {
                f.write_str("mk_(")?;
                write_list(f, vs.iter())?;
                f.write_str(")")
            }
            Value::Record(n, vs) => {
                write!(f, "mk_{n}(")?;
                write_list(f, vs.iter())?;
                f.write_str(")")
            }
        }
    }
}
