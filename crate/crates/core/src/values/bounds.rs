//! Integer ranges implied by type invariants such as `inv s == s < 4`.

use num_bigint::BigInt;
use num_traits::One;

use crate::lang::{BinaryOp, Expr, ExprKind, Literal, Pattern, SpecModule, TypeBody, TypeExpr, UnaryOp};

/// Inclusive bounds on the integers of `t`, where known.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntRange {
    pub lo: Option<BigInt>,
    pub hi: Option<BigInt>,
}

impl IntRange {
    fn raise(&mut self, v: BigInt) {
        if self.lo.as_ref().is_none_or(|lo| v > *lo) {
            self.lo = Some(v);
        }
    }

    fn lower(&mut self, v: BigInt) {
        if self.hi.as_ref().is_none_or(|hi| v < *hi) {
            self.hi = Some(v);
        }
    }

    /// Both ends, if the range is bounded.
    pub fn bounded(&self) -> Option<(BigInt, BigInt)> {
        Some((self.lo.clone()?, self.hi.clone()?))
    }
}

/// The range of an integer type: `nat`, `nat1`, `int`, or a named alias of
/// one whose invariant compares its value with integer literals. `None` for
/// other types.
pub fn integer_range(t: &TypeExpr, m: &SpecModule) -> Option<IntRange> {
    integer_range_at(t, m, 0)
}

fn integer_range_at(t: &TypeExpr, m: &SpecModule, depth: u32) -> Option<IntRange> {
    match t {
        TypeExpr::Int => Some(IntRange::default()),
        TypeExpr::Nat => Some(IntRange {
            lo: Some(BigInt::from(0)),
            hi: None,
        }),
        TypeExpr::Nat1 => Some(IntRange {
            lo: Some(BigInt::one()),
            hi: None,
        }),
        TypeExpr::Named(n) if depth < 16 => {
            let def = m.type_def(n)?;
            let TypeBody::Alias(base) = &def.body else {
                return None;
            };
            let mut r = integer_range_at(base, m, depth + 1)?;
            if let Some((Pattern::Ident(v), body)) = &def.invariant {
                tighten(&mut r, v, body);
            }
            Some(r)
        }
        _ => None,
    }
}

fn tighten(r: &mut IntRange, var: &str, e: &Expr) {
    let ExprKind::Binary { op, left, right } = &e.kind else {
        return;
    };
    if *op == BinaryOp::And {
        tighten(r, var, left);
        tighten(r, var, right);
        return;
    }
    let (op, k) = match (&left.kind, int_literal(right), int_literal(left), &right.kind) {
        (ExprKind::Name(n), Some(k), _, _) if n == var => (*op, k),
        (_, _, Some(k), ExprKind::Name(n)) if n == var => match op {
            BinaryOp::Lt => (BinaryOp::Gt, k),
            BinaryOp::Le => (BinaryOp::Ge, k),
            BinaryOp::Gt => (BinaryOp::Lt, k),
            BinaryOp::Ge => (BinaryOp::Le, k),
            other => (*other, k),
        },
        _ => return,
    };
    match op {
        BinaryOp::Lt => r.lower(k - 1),
        BinaryOp::Le => r.lower(k),
        BinaryOp::Gt => r.raise(k + 1),
        BinaryOp::Ge => r.raise(k),
        BinaryOp::Eq => {
            r.raise(k.clone());
            r.lower(k);
        }
        _ => {}
    }
}

/// An integer literal, possibly negated.
fn int_literal(e: &Expr) -> Option<BigInt> {
    match &e.kind {
        ExprKind::Literal(Literal::Int(k)) => Some(k.clone()),
        ExprKind::Unary { op: UnaryOp::Neg, operand } => int_literal(operand).map(|k| -k),
        _ => None,
    }
}
