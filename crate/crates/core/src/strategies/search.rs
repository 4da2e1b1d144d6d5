//! The search strategy: for each comparison of a bound variable with a
//! literal, the boundary value that makes the comparison false.

use num_rational::BigRational;
use num_traits::One;

use super::{BindValues, Strategy, StrategyRequest, StrategyResult};
use crate::interp::literal_value;
use crate::lang::{BinaryOp, Expr, ExprKind, Literal};
use crate::values::{type_membership, Value};

#[derive(Clone, Debug, Default)]
pub struct SearchStrategy;

impl Strategy for SearchStrategy {
    fn name(&self) -> &'static str {
        "search"
    }

    fn run(&self, req: &mut StrategyRequest<'_, '_>) -> StrategyResult {
        let mut found: Vec<(String, Value)> = Vec::new();
        req.po.expr.walk(&mut |e| found.extend(falsifier(e)));
        let mut bindings: Vec<BindValues> = Vec::new();
        for b in req.binds {
            let mut values: Vec<Value> = Vec::new();
            for (name, v) in &found {
                if *name == b.name && !values.contains(v) && type_membership(v, &b.ty, req.ctx.module, req.ctx) {
                    values.push(v.clone());
                }
            }
            if !values.is_empty() {
                bindings.push(BindValues {
                    name: b.name.clone(),
                    ty: b.ty.clone(),
                    values,
                    complete: false,
                });
            }
        }
        StrategyResult {
            bindings,
            ..StrategyResult::default()
        }
    }
}

/// The variable and value falsifying `v op k` or `k op v`, if `e` has
/// that shape.
fn falsifier(e: &Expr) -> Option<(String, Value)> {
    let ExprKind::Binary { op, left, right } = &e.kind else {
        return None;
    };
    let (name, lit, op) = match (&left.kind, &right.kind) {
        (ExprKind::Name(n), ExprKind::Literal(l)) => (n, l, *op),
        (ExprKind::Literal(l), ExprKind::Name(n)) => (n, l, flip(*op)?),
        _ => return None,
    };
    let value = match lit {
        Literal::Int(_) | Literal::Real(_) => {
            let k = literal_value(lit).as_rational()?;
            let one = BigRational::one();
            Value::number(match op {
                BinaryOp::Gt | BinaryOp::Lt | BinaryOp::Ne => k,
                BinaryOp::Ge => k - one,
                BinaryOp::Le | BinaryOp::Eq => k + one,
                _ => return None,
            })
        }
        Literal::Bool(b) => match op {
            BinaryOp::Eq => Value::Bool(!b),
            BinaryOp::Ne => Value::Bool(*b),
            _ => return None,
        },
        other => match op {
            BinaryOp::Ne => literal_value(other),
            _ => return None,
        },
    };
    Some((name.clone(), value))
}

/// `k op v` as `v op' k`.
fn flip(op: BinaryOp) -> Option<BinaryOp> {
    Some(match op {
        BinaryOp::Lt => BinaryOp::Gt,
        BinaryOp::Le => BinaryOp::Ge,
        BinaryOp::Gt => BinaryOp::Lt,
        BinaryOp::Ge => BinaryOp::Le,
        BinaryOp::Eq | BinaryOp::Ne => op,
        _ => return None,
    })
}
