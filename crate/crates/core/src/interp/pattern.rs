//! Pattern matching against runtime values.

use crate::lang::{Literal, Pattern};
use crate::values::Value;

/// The runtime value of a literal.
pub fn literal_value(l: &Literal) -> Value {
    match l {
        Literal::Bool(b) => Value::Bool(*b),
        Literal::Int(i) => Value::Int(i.clone()),
        Literal::Real(r) => Value::number(r.clone()),
        Literal::Char(c) => Value::Char(*c),
        Literal::Quote(q) => Value::Quote(q.clone()),
        Literal::Str(s) => Value::string(s),
        Literal::Nil => Value::Nil,
    }
}

/// Matches `v` against `p`, returning the bindings in pattern order, or
/// `None` if the value does not match. A name occurring twice must bind
/// equal values.
pub fn match_pattern(p: &Pattern, v: &Value) -> Option<Vec<(String, Value)>> {
    let mut out = Vec::new();
    matches(p, v, &mut out).then_some(out)
}

fn matches(p: &Pattern, v: &Value, out: &mut Vec<(String, Value)>) -> bool {
    match (p, v) {
        (Pattern::Ignore, _) => true,
        (Pattern::Ident(n), _) => match out.iter().find(|(m, _)| m == n) {
            Some((_, prev)) => prev == v,
            None => {
                out.push((n.clone(), v.clone()));
                true
            }
        },
        (Pattern::Literal(l), _) => &literal_value(l) == v,
        (Pattern::Tuple(ps), Value::Tuple(vs)) | (Pattern::SeqEnum(ps), Value::Seq(vs)) => {
            ps.len() == vs.len() && ps.iter().zip(vs).all(|(p, v)| matches(p, v, out))
        }
        (Pattern::Record(name, ps), Value::Record(tag, vs)) => {
            name == tag && ps.len() == vs.len() && ps.iter().zip(vs).all(|(p, v)| matches(p, v, out))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_and_identifier_patterns() {
        assert_eq!(match_pattern(&Pattern::Literal(Literal::Int(0.into())), &Value::int(0)), Some(vec![]));
        let one = Value::seq([Value::int(1)]);
        assert_eq!(
            match_pattern(&Pattern::Ident("x".into()), &one),
            Some(vec![("x".to_string(), one.clone())])
        );
        assert_eq!(match_pattern(&Pattern::Ignore, &Value::Nil), Some(vec![]));
    }

    #[test]
    fn structural_mismatch() {
        let p = Pattern::Tuple(vec![Pattern::Ident("a".into()), Pattern::Literal(Literal::Int(0.into()))]);
        let v = Value::Tuple(vec![Value::int(5), Value::int(1)]);
        assert_eq!(match_pattern(&p, &v), None);
        let v = Value::Tuple(vec![Value::int(5), Value::int(0)]);
        assert_eq!(match_pattern(&p, &v), Some(vec![("a".to_string(), Value::int(5))]));
    }

    #[test]
    fn repeated_names_must_agree() {
        let p = Pattern::Tuple(vec![Pattern::Ident("a".into()), Pattern::Ident("a".into())]);
        assert!(match_pattern(&p, &Value::Tuple(vec![Value::int(1), Value::int(2)])).is_none());
        assert!(match_pattern(&p, &Value::Tuple(vec![Value::int(2), Value::int(2)])).is_some());
    }
}
