//! The trivial strategy: recognises obligations whose conclusion is one of
//! their own antecedents.

use std::collections::BTreeSet;

use super::direct::{collect_bound, first_partial};
use super::{Strategy, StrategyRequest, StrategyResult};
use crate::interp::{quantifier_chain, Polarity};
use crate::lang::{to_vdm_string, BinaryOp, Expr, ExprKind, Literal, SpecModule, UnaryOp};

#[derive(Clone, Debug, Default)]
pub struct TrivialStrategy;

impl Strategy for TrivialStrategy {
    fn name(&self) -> &'static str {
        "trivial"
    }

    fn run(&self, req: &mut StrategyRequest<'_, '_>) -> StrategyResult {
        if req.po.polarity == Polarity::Existential {
            return StrategyResult::default();
        }
        match trivial_reason(&req.po.expr, req.ctx.module) {
            Some(reason) => StrategyResult::proved(reason),
            None => StrategyResult::default(),
        }
    }
}

/// `trivial <conclusion>` when the body under the outer universal binds is
/// an implication chain whose conclusion is implied syntactically.
pub fn trivial_reason(expr: &Expr, m: &SpecModule) -> Option<String> {
    let (polarity, _, body) = quantifier_chain(expr);
    if polarity == Some(Polarity::Existential) {
        return None;
    }
    let mut antecedents: Vec<&Expr> = Vec::new();
    let mut conclusion = body;
    while let ExprKind::Binary {
        op: BinaryOp::Implies,
        left,
        right,
    } = &conclusion.kind
    {
        conjuncts(left, &mut antecedents);
        conclusion = right;
    }
    if antecedents.is_empty() {
        return None;
    }
    let mut locals = BTreeSet::new();
    collect_bound(expr, &mut locals);
    if antecedents.iter().any(|a| first_partial(a, m, &locals).is_some()) {
        return None;
    }
    if is_bool(conclusion, true) {
        return Some("trivial true".into());
    }
    if antecedents.iter().any(|a| is_bool(a, false)) {
        return Some("trivial false".into());
    }
    let mut goals = Vec::new();
    conjuncts(conclusion, &mut goals);
    if goals.iter().all(|g| antecedents.iter().any(|a| same_fact(a, g))) {
        Some(format!("trivial {}", strip_outer_parens(&to_vdm_string(conclusion))))
    } else {
        None
    }
}

fn conjuncts<'e>(e: &'e Expr, out: &mut Vec<&'e Expr>) {
    match &e.kind {
        ExprKind::Binary {
            op: BinaryOp::And,
            left,
            right,
        } => {
            conjuncts(left, out);
            conjuncts(right, out);
        }
        _ => out.push(e),
    }
}

/// Syntactic equality, also relating `not (x = y)` to `x <> y` and
/// swapped operands of `=` and `<>`.
fn same_fact(a: &Expr, b: &Expr) -> bool {
    if a == b {
        return true;
    }
    match (comparison(a), comparison(b)) {
        (Some((pa, la, ra)), Some((pb, lb, rb))) => pa == pb && ((la == lb && ra == rb) || (la == rb && ra == lb)),
        _ => false,
    }
}

/// `(true, x, y)` for `x = y`, `(false, x, y)` for `x <> y` or
/// `not (x = y)`.
fn comparison(e: &Expr) -> Option<(bool, &Expr, &Expr)> {
    match &e.kind {
        ExprKind::Binary { op: BinaryOp::Eq, left, right } => Some((true, left, right)),
        ExprKind::Binary { op: BinaryOp::Ne, left, right } => Some((false, left, right)),
        ExprKind::Unary { op: UnaryOp::Not, operand } => {
            let (eq, l, r) = comparison(operand)?;
            Some((!eq, l, r))
        }
        _ => None,
    }
}

fn is_bool(e: &Expr, b: bool) -> bool {
    matches!(&e.kind, ExprKind::Literal(Literal::Bool(v)) if *v == b)
}

/// Removes one pair of enclosing parentheses if they match each other.
fn strip_outer_parens(s: &str) -> &str {
    let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
        return s;
    };
    let mut depth = 0i32;
    for c in inner.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return s;
                }
            }
            _ => {}
        }
    }
    inner
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_expression;
    use crate::strategies::testing::{module, run_po};
    use crate::strategies::Verdict;

    fn reason(src: &str) -> Option<String> {
        trivial_reason(&parse_expression(src, "t").unwrap(), &SpecModule::default())
    }

    #[test]
    fn guarded_apply_is_trivial() {
        let m = module(
            "functions\n    itemAt: seq of nat * nat -> nat\n    itemAt(list, index) ==\n        if index in set inds list\n        then list(index)\n        else 0;\n",
        );
        match run_po(&TrivialStrategy, &m, 1).verdict {
            Some(Verdict::Proved { reason, .. }) => assert_eq!(reason, "trivial index in set (inds list)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn containment_rules() {
        assert_eq!(reason("forall x:int & x <> 0 => x <> 0").as_deref(), Some("trivial x <> 0"));
        assert!(reason("forall x:int & (x > 1 and x <> 0) => x <> 0").is_some());
        assert!(reason("forall x:int, y:int & x > 1 => (y > 2 => (y > 2 and x > 1))").is_some());
        assert_eq!(reason("forall x:int & x > 1 => true").as_deref(), Some("trivial true"));
        assert!(reason("forall x:int & false => x > 1").is_some());
        assert_eq!(reason("forall x:int & x > 0 => x >= 0"), None);
        assert!(reason("forall s:seq of nat & not (s = []) => s <> []").is_some());
        assert!(reason("forall x:int & 0 <> x => x <> 0").is_some());
        assert_eq!(reason("forall x:int & not (x = 0) => x = 0"), None);
        assert_eq!(reason("forall x:int & x > 0"), None);
        assert_eq!(reason("exists x:int & x > 0 => x > 0"), None);
    }

    #[test]
    fn partial_antecedents_block_the_verdict() {
        assert_eq!(reason("forall s:seq of nat & hd s > 0 => hd s > 0"), None);
        assert_eq!(reason("forall x:int & 1 div x > 0 => 1 div x > 0"), None);
    }

    #[test]
    fn parentheses_are_stripped_only_when_matched() {
        assert_eq!(strip_outer_parens("(a) and (b)"), "(a) and (b)");
        assert_eq!(strip_outer_parens("(a in set (b))"), "a in set (b)");
    }
}
