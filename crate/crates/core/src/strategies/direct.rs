//! The direct strategy: checks what an obligation is about by looking at
//! its source construct instead of evaluating it.

use std::collections::BTreeSet;

use super::{Strategy, StrategyRequest, StrategyResult};
use crate::interp::match_pattern;
use crate::lang::{BinaryOp, Bind, CaseAlt, Expr, ExprKind, FunctionDef, Location, SpecModule, TypeEnv, UnaryOp};
use crate::pog::{PoKind, ProofObligation};
use crate::values::{cardinality, enumerate_all};

/// Largest scrutinee type whose values are matched one by one.
pub const DIRECT_ENUMERATION_LIMIT: u64 = 1000;

#[derive(Clone, Debug, Default)]
pub struct DirectStrategy;

impl Strategy for DirectStrategy {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn run(&self, req: &mut StrategyRequest<'_, '_>) -> StrategyResult {
        match req.po.kind {
            PoKind::CasesExhaustive => cases_exhaustive(req),
            PoKind::Subtype if result_is_total(req.po, req.ctx.module) => {
                StrategyResult::proved("direct (body is total)")
            }
            _ => StrategyResult::default(),
        }
    }
}

fn cases_exhaustive(req: &mut StrategyRequest<'_, '_>) -> StrategyResult {
    let m = req.ctx.module;
    let Some(alts) = find_cases(m, &req.po.loc) else {
        return StrategyResult::default();
    };
    let patterns: Vec<_> = alts.iter().flat_map(|a| a.patterns.iter()).collect();
    if patterns.iter().any(|p| p.is_irrefutable()) {
        return StrategyResult::proved("direct (cases exhaustive)");
    }
    let Some(t) = &req.po.subject_type else {
        return StrategyResult::default();
    };
    let t = t.substitute(&|n| req.type_args.get(n).cloned());
    if t.has_type_params() || !cardinality(&t, m).at_most(DIRECT_ENUMERATION_LIMIT) {
        return StrategyResult::default();
    }
    let (values, enumerated) = enumerate_all(&t, DIRECT_ENUMERATION_LIMIT, m, req.ctx);
    if enumerated && values.iter().all(|v| patterns.iter().any(|p| match_pattern(p, v).is_some())) {
        StrategyResult::proved("direct (cases exhaustive)")
    } else {
        StrategyResult::default()
    }
}

/// The `others`-less cases expression at `loc`.
fn find_cases<'m>(m: &'m SpecModule, loc: &Location) -> Option<&'m [CaseAlt]> {
    let mut roots: Vec<&Expr> = Vec::new();
    for f in &m.functions {
        roots.push(&f.body);
        roots.extend(f.pre.iter());
        roots.extend(f.post.iter());
    }
    roots.extend(m.values.iter().map(|v| &v.value));
    roots.extend(m.types.iter().filter_map(|t| t.invariant.as_ref().map(|(_, e)| e)));
    let mut found = None;
    for r in roots {
        r.walk(&mut |e| {
            if let ExprKind::Cases { alts, others: None, .. } = &e.kind {
                if e.loc == *loc && found.is_none() {
                    found = Some(alts.as_slice());
                }
            }
        });
    }
    found
}

/// A subtype obligation on a function result holds when the body cannot
/// fail and its static type already lies within the declared result type.
fn result_is_total(po: &ProofObligation, m: &SpecModule) -> bool {
    if !po.on_result {
        return false;
    }
    let Some(f) = m.function(&po.owner) else {
        return false;
    };
    if !body_is_total(f, m) {
        return false;
    }
    let mut env = TypeEnv::new(m);
    env.push();
    for (p, t) in f.params.iter().zip(&f.param_types) {
        if env.bind_pattern(p, t, &f.loc).is_err() {
            return false;
        }
    }
    match env.infer(&f.body) {
        Ok(t) => env.is_subtype(&t, &f.return_type),
        Err(_) => false,
    }
}

/// Conservative totality: the body contains no partial operator anywhere
/// and calls no user function other than total `pre_` conditions.
pub fn body_is_total(f: &FunctionDef, m: &SpecModule) -> bool {
    let mut locals: BTreeSet<String> = f.params.iter().flat_map(|p| p.variables()).collect();
    collect_bound(&f.body, &mut locals);
    first_partial(&f.body, m, &locals).is_none()
}

pub(crate) fn collect_bound(e: &Expr, out: &mut BTreeSet<String>) {
    e.walk(&mut |x| match &x.kind {
        ExprKind::Let { defs, .. } => out.extend(defs.iter().flat_map(|(p, _)| p.variables())),
        ExprKind::LetBe { bind, .. } => out.extend(bind.pattern().variables()),
        ExprKind::Forall { binds, .. } | ExprKind::Exists { binds, .. } | ExprKind::SetComp { binds, .. } => {
            out.extend(binds.iter().flat_map(|b| b.pattern().variables()))
        }
        ExprKind::SeqComp { bind, .. } => out.extend(bind.pattern().variables()),
        ExprKind::Cases { alts, .. } => out.extend(alts.iter().flat_map(|a| a.patterns.iter().flat_map(|p| p.variables()))),
        _ => {}
    });
}

/// The first sub-expression whose evaluation may raise a runtime error.
pub(crate) fn first_partial<'e>(e: &'e Expr, m: &SpecModule, locals: &BTreeSet<String>) -> Option<&'e Expr> {
    let mut visiting = Vec::new();
    partial(e, m, locals, &mut visiting)
}

fn partial<'e>(
    e: &'e Expr,
    m: &SpecModule,
    locals: &BTreeSet<String>,
    visiting: &mut Vec<String>,
) -> Option<&'e Expr> {
    let here = match &e.kind {
        ExprKind::Unary { op, .. } => matches!(op, UnaryOp::Hd | UnaryOp::Tl),
        ExprKind::Binary { op, .. } => matches!(
            op,
            BinaryOp::Div | BinaryOp::IntDiv | BinaryOp::Mod | BinaryOp::Rem | BinaryOp::Munion
        ),
        ExprKind::Cases { others, .. } => others.is_none(),
        ExprKind::LetBe { .. } => true,
        ExprKind::Let { defs, .. } => defs.iter().any(|(p, _)| !p.is_irrefutable()),
        ExprKind::Forall { binds, .. } | ExprKind::Exists { binds, .. } | ExprKind::SetComp { binds, .. } => {
            binds.iter().any(|b| !b.pattern().is_irrefutable() || matches!(b, Bind::Type { .. }))
        }
        ExprKind::SeqComp { bind, .. } => !bind.pattern().is_irrefutable(),
        ExprKind::Record { name, .. } => m.type_def(name).is_some_and(|d| d.invariant.is_some()),
        ExprKind::Apply { callee, .. } => !total_call(callee, m, locals, visiting),
        ExprKind::Instantiate { .. } => false,
        _ => false,
    };
    if here {
        return Some(e);
    }
    e.children().into_iter().find_map(|c| partial(c, m, locals, visiting))
}

fn total_call(callee: &Expr, m: &SpecModule, locals: &BTreeSet<String>, visiting: &mut Vec<String>) -> bool {
    let name = match &callee.kind {
        ExprKind::Name(n) if !locals.contains(n) => n,
        ExprKind::Instantiate { name, .. } => name,
        _ => return false,
    };
    match name.strip_prefix("pre_").and_then(|b| m.function(b)) {
        Some(base) => condition_is_total(base, m, visiting),
        None => false,
    }
}

fn condition_is_total(f: &FunctionDef, m: &SpecModule, visiting: &mut Vec<String>) -> bool {
    let Some(cond) = &f.pre else {
        return true;
    };
    if visiting.contains(&f.name) {
        return false;
    }
    visiting.push(f.name.clone());
    let mut locals: BTreeSet<String> = f.params.iter().flat_map(|p| p.variables()).collect();
    collect_bound(cond, &mut locals);
    let ok = partial(cond, m, &locals, visiting).is_none();
    visiting.pop();
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_expression, TypeExpr};
    use crate::strategies::testing::{module, pos, run_po, run_with};
    use crate::strategies::{request_binds, Verdict};
    use std::collections::BTreeMap;

    fn reason(r: &StrategyResult) -> Option<&str> {
        match &r.verdict {
            Some(Verdict::Proved { reason, .. }) => Some(reason),
            _ => None,
        }
    }

    #[test]
    fn boolean_cases_are_exhaustive() {
        let m = module("functions\n  f: bool -> nat\n  f(b) == cases b:\n    true -> 1,\n    false -> 2\n  end;\n");
        assert_eq!(reason(&run_po(&DirectStrategy, &m, 1)), Some("direct (cases exhaustive)"));
    }

    #[test]
    fn missing_clause_is_not_proved() {
        let m = module("functions\n  f: nat -> nat\n  f(n) == cases n:\n    0 -> 1,\n    1 -> 2\n  end;\n");
        assert_eq!(run_po(&DirectStrategy, &m, 1), StrategyResult::default());
        let m = module("types\n  C = <A> | <B> | <C>;\nfunctions\n  f: C -> nat\n  f(c) == cases c:\n    <A> -> 1,\n    <B> -> 2\n  end;\n");
        assert_eq!(run_po(&DirectStrategy, &m, 1), StrategyResult::default());
    }

    #[test]
    fn identifier_clause_matches_everything() {
        let m = module("functions\n  f: nat -> nat\n  f(n) == cases n:\n    0 -> 1,\n    k -> k\n  end;\n");
        assert!(reason(&run_po(&DirectStrategy, &m, 1)).is_some());
    }

    #[test]
    fn total_body_discharges_result_subtype() {
        let m = module("functions\n  f: int -> int\n  f(x) == x + 1;\n");
        assert!(pos(&m).is_empty());
        let mut po = pos(&module(crate::strategies::testing::DIV)).remove(0);
        po.kind = PoKind::Subtype;
        po.owner = "f".into();
        po.on_result = true;
        po.expr = parse_expression("forall x:int & is_(x + 1, int)", "test.vdmsl").unwrap();
        let binds = request_binds(&po, &BTreeMap::new());
        let r = run_with(&DirectStrategy, &m, &po, &binds);
        assert_eq!(reason(&r), Some("direct (body is total)"));
    }

    #[test]
    fn partial_bodies_are_not_total() {
        let m = module("functions\n  g: int -> int\n  g(x) == 10 div x;\n  h: seq of nat -> nat\n  h(s) == if s <> [] then hd s else 0;\n  k: nat -> nat\n  k(n) == n\n  pre n > 1;\n  u: nat -> bool\n  u(n) == pre_k(n);\n  v: nat -> nat\n  v(n) == k(n);\n");
        let total = |n: &str| body_is_total(m.function(n).unwrap(), &m);
        assert!(!total("g"));
        assert!(!total("h"));
        assert!(total("k"));
        assert!(total("u"));
        assert!(!total("v"));
        let _ = TypeExpr::Int;
    }

    #[test]
    fn other_kinds_are_ignored() {
        let m = module("functions\n  f: seq of nat * nat -> nat\n  f(s, i) == s(i);\n");
        assert_eq!(run_po(&DirectStrategy, &m, 1), StrategyResult::default());
    }
}
