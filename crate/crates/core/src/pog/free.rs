//! Free-name analysis.

use std::collections::BTreeSet;

use crate::lang::{Bind, Expr, ExprKind, Pattern};

/// Names occurring free in `e`, including the names of called functions.
pub fn free_names(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect(e, &mut Vec::new(), &mut out);
    out
}

fn collect(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let mark = bound.len();
    match &e.kind {
        ExprKind::Name(n) | ExprKind::Instantiate { name: n, .. } => {
            if !bound.contains(n) {
                out.insert(n.clone());
            }
        }
        ExprKind::Cases {
            scrutinee,
            alts,
            others,
        } => {
            collect(scrutinee, bound, out);
            for alt in alts {
                for p in &alt.patterns {
                    bind_pattern(p, bound);
                }
                collect(&alt.body, bound, out);
                bound.truncate(mark);
            }
            if let Some(o) = others {
                collect(o, bound, out);
            }
        }
        ExprKind::Let { defs, body } => {
            for (p, v) in defs {
                collect(v, bound, out);
                bind_pattern(p, bound);
            }
            collect(body, bound, out);
        }
        ExprKind::LetBe { bind, st, body } => {
            binds(std::slice::from_ref(bind), bound, out);
            if let Some(s) = st {
                collect(s, bound, out);
            }
            collect(body, bound, out);
        }
        ExprKind::Forall { binds: bs, body } | ExprKind::Exists { binds: bs, body } => {
            binds(bs, bound, out);
            collect(body, bound, out);
        }
        ExprKind::SetComp { elem, binds: bs, pred } => {
            binds(bs, bound, out);
            if let Some(p) = pred {
                collect(p, bound, out);
            }
            collect(elem, bound, out);
        }
        ExprKind::SeqComp { elem, bind, pred } => {
            binds(std::slice::from_ref(&**bind), bound, out);
            if let Some(p) = pred {
                collect(p, bound, out);
            }
            collect(elem, bound, out);
        }
        _ => {
            for c in e.children() {
                collect(c, bound, out);
            }
        }
    }
    bound.truncate(mark);
}

fn binds(bs: &[Bind], bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    for b in bs {
        if let Bind::Set { set, .. } = b {
            collect(set, bound, out);
        }
    }
    for b in bs {
        bind_pattern(b.pattern(), bound);
    }
}

fn bind_pattern(p: &Pattern, bound: &mut Vec<String>) {
    bound.extend(p.variables());
}
