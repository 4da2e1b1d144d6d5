//! Type membership, including numeric ranges and invariants.

use num_traits::{One, Signed, Zero};

use super::Value;
use crate::lang::{SpecModule, TypeBody, TypeExpr};

/// Evaluates named-type invariants. The interpreter context implements this;
/// [`NoInvariants`] accepts everything.
pub trait InvariantOracle {
    /// True if `v` satisfies the invariant of `type_name`. Evaluation errors
    /// count as false and should be recorded by the implementor.
    fn invariant_holds(&mut self, type_name: &str, v: &Value) -> bool;
}

pub struct NoInvariants;

impl InvariantOracle for NoInvariants {
    fn invariant_holds(&mut self, _: &str, _: &Value) -> bool {
        true
    }
}

/// True iff `v` inhabits `t`.
pub fn type_membership(v: &Value, t: &TypeExpr, module: &SpecModule, oracle: &mut dyn InvariantOracle) -> bool {
    member(v, t, module, oracle, 0)
}

fn member(v: &Value, t: &TypeExpr, m: &SpecModule, o: &mut dyn InvariantOracle, depth: u32) -> bool {
    if depth > 64 {
        return false;
    }
    let d = depth + 1;
    match (t, v) {
        (TypeExpr::Any | TypeExpr::TypeParam(_), _) => true,
        (TypeExpr::Bool, Value::Bool(_)) => true,
        (TypeExpr::Nat, Value::Int(i)) => !i.is_negative(),
        (TypeExpr::Nat1, Value::Int(i)) => i >= &One::one(),
        (TypeExpr::Int, Value::Int(_)) => true,
        (TypeExpr::Real, Value::Int(_) | Value::Real(_)) => true,
        (TypeExpr::Char, Value::Char(_)) => true,
        (TypeExpr::Quote(q), Value::Quote(x)) => q == x,
        (TypeExpr::Seq(e), Value::Seq(vs)) => vs.iter().all(|x| member(x, e, m, o, d)),
        (TypeExpr::Set(e), Value::Set(vs)) => vs.iter().all(|x| member(x, e, m, o, d)),
        (TypeExpr::Map(kt, vt), Value::Map(entries)) => entries
            .iter()
            .all(|(k, x)| member(k, kt, m, o, d) && member(x, vt, m, o, d)),
        (TypeExpr::Product(ts), Value::Tuple(vs)) => {
            ts.len() == vs.len() && ts.iter().zip(vs).all(|(t, x)| member(x, t, m, o, d))
        }
        (TypeExpr::Optional(_), Value::Nil) => true,
        (TypeExpr::Optional(inner), _) => member(v, inner, m, o, d),
        (TypeExpr::Union(ts), _) => ts.iter().any(|t| member(v, t, m, o, d)),
        (TypeExpr::Named(n), _) => named_member(v, n, m, o, d),
        _ => false,
    }
}

fn named_member(v: &Value, name: &str, m: &SpecModule, o: &mut dyn InvariantOracle, d: u32) -> bool {
    let structural = match m.type_def(name) {
        Some(def) => match &def.body {
            TypeBody::Alias(t) => member(v, t, m, o, d),
            TypeBody::Record(fields) => record_member(v, name, fields, m, o, d),
        },
        None => match &m.state {
            Some(s) if s.name == name => record_member(v, name, &s.fields, m, o, d),
            _ => false,
        },
    };
    let has_inv = m.type_def(name).is_some_and(|t| t.invariant.is_some());
    structural && (!has_inv || o.invariant_holds(name, v))
}

fn record_member(
    v: &Value,
    name: &str,
    fields: &[(String, TypeExpr)],
    m: &SpecModule,
    o: &mut dyn InvariantOracle,
    d: u32,
) -> bool {
    match v {
        Value::Record(n, vs) => {
            n == name
                && vs.len() == fields.len()
                && fields.iter().zip(vs).all(|((_, t), x)| member(x, t, m, o, d))
        }
        _ => false,
    }
}

/// Lower bound for integer types, if any.
pub fn integer_lower_bound(t: &TypeExpr) -> Option<num_bigint::BigInt> {
    match t {
        TypeExpr::Nat => Some(Zero::zero()),
        TypeExpr::Nat1 => Some(One::one()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_specification, parse_type};

    #[test]
    fn numeric_ranges() {
        let m = SpecModule::default();
        let t = |s: &str| parse_type(s).unwrap();
        assert!(!type_membership(&Value::int(0), &t("nat1"), &m, &mut NoInvariants));
        assert!(type_membership(&Value::int(0), &t("nat"), &m, &mut NoInvariants));
        assert!(!type_membership(&Value::int(-1), &t("nat"), &m, &mut NoInvariants));
        assert!(type_membership(&Value::int(-1), &t("real"), &m, &mut NoInvariants));
        assert!(type_membership(&Value::Nil, &t("[nat]"), &m, &mut NoInvariants));
        assert!(type_membership(
            &Value::Tuple(vec![Value::Bool(true), Value::Quote("A".into())]),
            &t("bool * (bool | <A>)"),
            &m,
            &mut NoInvariants
        ));
    }

    #[test]
    fn invariants_are_consulted() {
        struct CardAtMostOne;
        impl InvariantOracle for CardAtMostOne {
            fn invariant_holds(&mut self, _: &str, v: &Value) -> bool {
                matches!(v, Value::Set(s) if s.len() <= 1)
            }
        }
        let m = parse_specification("types\n  S = set of nat inv s == card s <= 1;", "t").unwrap();
        let s = TypeExpr::Named("S".into());
        let two = Value::set([Value::int(1), Value::int(2)]);
        assert!(!type_membership(&two, &s, &m, &mut CardAtMostOne));
        assert!(type_membership(&Value::set([Value::int(1)]), &s, &m, &mut CardAtMostOne));
    }
}
