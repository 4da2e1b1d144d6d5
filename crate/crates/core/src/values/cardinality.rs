//! Type cardinality, ignoring invariants.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::bounds::integer_range;
use super::generate::enumerate_raw;
use crate::lang::{SpecModule, TypeBody, TypeExpr};

/// Size of the `char` alphabet used for counting and enumeration.
pub const CHAR_ALPHABET: u32 = 128;

/// Exponents above this make a count unrepresentable in practice; such
/// types are reported as infinite.
const MAX_EXPONENT: u64 = 1 << 20;

/// Union members are enumerated to remove overlaps when their summed size is
/// at most this.
const UNION_DEDUP_LIMIT: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cardinality {
    Finite(BigUint),
    Infinite,
}

impl Cardinality {
    pub fn finite(n: u64) -> Self {
        Cardinality::Finite(BigUint::from(n))
    }

    /// True if finite and at most `limit`.
    pub fn at_most(&self, limit: u64) -> bool {
        matches!(self, Cardinality::Finite(n) if *n <= BigUint::from(limit))
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Cardinality::Finite(n) => n.to_u64(),
            Cardinality::Infinite => None,
        }
    }

    fn mul(self, other: Cardinality) -> Cardinality {
        match (self, other) {
            (Cardinality::Finite(a), _) | (_, Cardinality::Finite(a)) if a.is_zero() => {
                Cardinality::Finite(BigUint::zero())
            }
            (Cardinality::Finite(a), Cardinality::Finite(b)) => Cardinality::Finite(a * b),
            _ => Cardinality::Infinite,
        }
    }

    fn add(self, other: Cardinality) -> Cardinality {
        match (self, other) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => Cardinality::Finite(a + b),
            _ => Cardinality::Infinite,
        }
    }

    fn pow(base: BigUint, exp: &BigUint) -> Cardinality {
        if base <= BigUint::one() || exp.is_zero() {
            return Cardinality::Finite(if exp.is_zero() { BigUint::one() } else { base });
        }
        match exp.to_u64().filter(|e| *e <= MAX_EXPONENT) {
            Some(e) => Cardinality::Finite(base.pow(e as u32)),
            None => Cardinality::Infinite,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite => f.write_str("infinite"),
        }
    }
}

/// Number of values of `t`. Invariants count only through the integer
/// ranges they imply (see [`integer_range`]). Recursive named types
/// are infinite.
pub fn cardinality(t: &TypeExpr, module: &SpecModule) -> Cardinality {
    count(t, module, &mut Vec::new())
}

fn count(t: &TypeExpr, m: &SpecModule, visiting: &mut Vec<String>) -> Cardinality {
    match t {
        TypeExpr::Bool => Cardinality::finite(2),
        TypeExpr::Char => Cardinality::finite(CHAR_ALPHABET as u64),
        TypeExpr::Quote(_) => Cardinality::finite(1),
        TypeExpr::Nat | TypeExpr::Nat1 | TypeExpr::Int | TypeExpr::Real | TypeExpr::Seq(_) => {
            Cardinality::Infinite
        }
        TypeExpr::TypeParam(_) | TypeExpr::Any => Cardinality::Infinite,
        TypeExpr::Set(e) => match count(e, m, visiting) {
            Cardinality::Finite(n) => Cardinality::pow(BigUint::from(2u32), &n),
            Cardinality::Infinite => Cardinality::Infinite,
        },
        TypeExpr::Map(d, r) => match (count(d, m, visiting), count(r, m, visiting)) {
            (Cardinality::Finite(dn), Cardinality::Finite(rn)) => Cardinality::pow(rn + 1u32, &dn),
            _ => Cardinality::Infinite,
        },
        TypeExpr::Product(ts) => ts
            .iter()
            .fold(Cardinality::finite(1), |acc, t| acc.mul(count(t, m, visiting))),
        TypeExpr::Optional(inner) => {
            let base = match &**inner {
                TypeExpr::Optional(x) => x,
                other => other,
            };
            count(base, m, visiting).add(Cardinality::finite(1))
        }
        TypeExpr::Union(ts) => {
            let mut members: Vec<&TypeExpr> = Vec::new();
            for t in ts {
                if !members.contains(&t) {
                    members.push(t);
                }
            }
            let total = members
                .iter()
                .fold(Cardinality::finite(0), |acc, t| acc.add(count(t, m, visiting)));
            match total.as_u64() {
                Some(n) if n <= UNION_DEDUP_LIMIT => {
                    let mut seen = std::collections::BTreeSet::new();
                    for t in members {
                        if let Some(vs) = enumerate_raw(t, m, UNION_DEDUP_LIMIT as usize) {
                            seen.extend(vs);
                        }
                    }
                    Cardinality::finite(seen.len() as u64)
                }
                _ => total,
            }
        }
        TypeExpr::Named(n) => {
            if visiting.contains(n) {
                return Cardinality::Infinite;
            }
            if let Some((lo, hi)) = integer_range(t, m).and_then(|r| r.bounded()) {
                return Cardinality::Finite((hi - lo + 1u32).to_biguint().unwrap_or_default());
            }
            visiting.push(n.clone());
            let c = match m.type_def(n).map(|d| &d.body) {
                Some(TypeBody::Alias(t)) => count(t, m, visiting),
                Some(TypeBody::Record(fields)) => fields
                    .iter()
                    .fold(Cardinality::finite(1), |acc, (_, t)| acc.mul(count(t, m, visiting))),
                None => match &m.state {
                    Some(s) if &s.name == n => s
                        .fields
                        .iter()
                        .fold(Cardinality::finite(1), |acc, (_, t)| acc.mul(count(t, m, visiting))),
                    _ => Cardinality::Infinite,
                },
            };
            visiting.pop();
            c
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_type;

    fn card(s: &str) -> Cardinality {
        cardinality(&parse_type(s).unwrap(), &SpecModule::default())
    }

    #[test]
    fn basic_counts() {
        assert_eq!(card("set of bool"), Cardinality::finite(4));
        assert_eq!(card("bool"), Cardinality::finite(2));
        assert_eq!(card("bool * (bool | <A>)"), Cardinality::finite(6));
        assert_eq!(card("map bool to bool"), Cardinality::finite(9));
        assert_eq!(card("[bool]"), Cardinality::finite(3));
        assert_eq!(card("nat"), Cardinality::Infinite);
        assert_eq!(card("seq of bool"), Cardinality::Infinite);
        assert_eq!(card("set of char"), Cardinality::Finite(BigUint::from(2u32).pow(128)));
    }

    #[test]
    fn overlapping_union_members_are_counted_once() {
        assert_eq!(card("bool | [bool]"), Cardinality::finite(3));
        assert_eq!(card("bool | bool"), Cardinality::finite(2));
    }

    #[test]
    fn recursive_named_types_are_infinite() {
        let m = crate::lang::parse_specification("types\n  T = [T];", "t").unwrap();
        assert_eq!(cardinality(&TypeExpr::Named("T".into()), &m), Cardinality::Infinite);
    }
}
