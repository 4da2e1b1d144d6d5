//! The obligation generator: a walk over every definition that records the
//! guards on the path to each partial construct.

use std::collections::BTreeSet;

use super::free::free_names;
use super::{PoKind, ProofObligation};
use crate::interp::Polarity;
use crate::lang::parser::int_literal;
use crate::lang::{
    to_vdm_string, ApplyKind, BinaryOp, Bind, CaseAlt, Expr, ExprKind, FunctionDef, Literal, Location, Pattern,
    SpecModule, TypeBody, TypeEnv, TypeExpr, UnaryOp,
};

/// Placeholder name for the hole in a guard template.
const HOLE: &str = "\u{0}";

#[derive(Clone)]
enum Guard {
    /// `cond => _`
    Cond(Expr),
    /// `let defs in _`
    Let(Vec<(Pattern, Expr)>),
    /// `cases s: <earlier> -> true, <pats> -> _, others -> true end`, or the
    /// `others` branch when `pats` is `None`.
    Cases {
        scrutinee: Expr,
        earlier: Vec<Vec<Pattern>>,
        pats: Option<Vec<Pattern>>,
    },
    /// `forall binds & _`
    Binds(Vec<Bind>),
}

impl Guard {
    fn template(&self, loc: &Location) -> Expr {
        let hole = Expr::name(HOLE, loc.clone());
        let kind = match self {
            Guard::Cond(c) => ExprKind::Binary {
                op: BinaryOp::Implies,
                left: Box::new(c.clone()),
                right: Box::new(hole),
            },
            Guard::Let(defs) => ExprKind::Let {
                defs: defs.clone(),
                body: Box::new(hole),
            },
            Guard::Cases {
                scrutinee,
                earlier,
                pats,
            } => {
                let t = Expr::bool(true, loc.clone());
                let mut alts: Vec<CaseAlt> = earlier
                    .iter()
                    .map(|ps| CaseAlt {
                        patterns: ps.clone(),
                        body: t.clone(),
                    })
                    .collect();
                let others = match pats {
                    Some(ps) => {
                        alts.push(CaseAlt {
                            patterns: ps.clone(),
                            body: hole,
                        });
                        t
                    }
                    None => hole,
                };
                ExprKind::Cases {
                    scrutinee: Box::new(scrutinee.clone()),
                    alts,
                    others: Some(Box::new(others)),
                }
            }
            Guard::Binds(binds) => ExprKind::Forall {
                binds: binds.clone(),
                body: Box::new(hole),
            },
        };
        Expr::new(kind, loc.clone())
    }

    /// Wraps an obligation and its text in this guard.
    fn wrap(&self, inner: Expr, inner_text: &str) -> (Expr, String) {
        let loc = inner.loc.clone();
        let template = self.template(&loc);
        let text = match self {
            Guard::Cond(c) => format!("({} => {inner_text})", to_vdm_string(c)),
            _ => format!("({})", template).replace(HOLE, inner_text),
        };
        (fill(template, &inner), text)
    }
}

fn fill(template: Expr, inner: &Expr) -> Expr {
    fn go(e: &mut Expr, inner: &Expr) -> bool {
        if matches!(&e.kind, ExprKind::Name(n) if n == HOLE) {
            *e = inner.clone();
            return true;
        }
        match &mut e.kind {
            ExprKind::Binary { right, .. } => go(right, inner),
            ExprKind::Let { body, .. } | ExprKind::Forall { body, .. } => go(body, inner),
            ExprKind::Cases { alts, others, .. } => {
                alts.iter_mut().any(|a| go(&mut a.body, inner)) || others.as_mut().is_some_and(|o| go(o, inner))
            }
            _ => false,
        }
    }
    let mut t = template;
    go(&mut t, inner);
    t
}

/// What the current definition contributes to every obligation in it.
struct Owner {
    name: String,
    patterns: Vec<Pattern>,
    params: Vec<Bind>,
    pre: Option<Expr>,
    type_params: Vec<String>,
}

struct Gen<'m> {
    module: &'m SpecModule,
    env: TypeEnv<'m>,
    guards: Vec<Guard>,
    owner: Owner,
    out: Vec<ProofObligation>,
    state_dependent: BTreeSet<String>,
}

/// Generates the obligations of a checked module, in source order of the
/// definitions and depth-first, left to right within each.
pub fn generate_pos(m: &SpecModule) -> Vec<ProofObligation> {
    enum Def<'a> {
        Function(&'a FunctionDef),
        Value(usize),
        TypeInv(usize),
        State,
    }
    let file_rank = |loc: &Location| {
        m.sources
            .iter()
            .position(|(f, _)| **f == *loc.file)
            .unwrap_or(usize::MAX)
    };
    let mut defs: Vec<(Location, Def)> = Vec::new();
    defs.extend(m.functions.iter().map(|f| (f.loc.clone(), Def::Function(f))));
    defs.extend(m.values.iter().enumerate().map(|(i, v)| (v.loc.clone(), Def::Value(i))));
    defs.extend(m.types.iter().enumerate().map(|(i, t)| (t.loc.clone(), Def::TypeInv(i))));
    if let Some(s) = &m.state {
        defs.push((s.loc.clone(), Def::State));
    }
    defs.sort_by_key(|(loc, _)| (file_rank(loc), loc.line, loc.col));

    let mut g = Gen {
        module: m,
        env: TypeEnv::new(m),
        guards: Vec::new(),
        owner: Owner {
            name: String::new(),
            patterns: Vec::new(),
            params: Vec::new(),
            pre: None,
            type_params: Vec::new(),
        },
        out: Vec::new(),
        state_dependent: state_dependent_functions(m),
    };
    for (_, d) in defs {
        match d {
            Def::Function(f) => g.function(f),
            Def::Value(i) => g.value(i),
            Def::TypeInv(i) => g.type_invariant(i),
            Def::State => g.state(),
        }
    }
    for (i, po) in g.out.iter_mut().enumerate() {
        po.number = i + 1;
    }
    g.out
}

/// Functions whose evaluation reads state, directly or through calls.
fn state_dependent_functions(m: &SpecModule) -> BTreeSet<String> {
    let Some(state) = &m.state else {
        return BTreeSet::new();
    };
    let fields: BTreeSet<&str> = state.fields.iter().map(|(n, _)| n.as_str()).collect();
    let uses: Vec<(String, BTreeSet<String>)> = m
        .functions
        .iter()
        .map(|f| {
            let params: BTreeSet<String> = f.params.iter().flat_map(|p| p.variables()).collect();
            let mut names = free_names(&f.body);
            for c in f.pre.iter().chain(f.post.iter()) {
                names.extend(free_names(c));
            }
            names.retain(|n| !params.contains(n) && n != "RESULT");
            (f.name.clone(), names)
        })
        .collect();
    let mut dependent: BTreeSet<String> = BTreeSet::new();
    loop {
        let before = dependent.len();
        for (name, names) in &uses {
            if names.iter().any(|n| {
                (fields.contains(n.as_str()) && m.value_def(n).is_none()) || dependent.contains(base_function(n))
            }) {
                dependent.insert(name.clone());
            }
        }
        if dependent.len() == before {
            return dependent;
        }
    }
}

fn base_function(name: &str) -> &str {
    name.strip_prefix("pre_")
        .or_else(|| name.strip_prefix("post_"))
        .unwrap_or(name)
}

/// The expression form of a pattern, if it has one.
fn pattern_expr(p: &Pattern, loc: &Location) -> Option<Expr> {
    let kind = match p {
        Pattern::Ident(n) => ExprKind::Name(n.clone()),
        Pattern::Ignore => return None,
        Pattern::Literal(l) => ExprKind::Literal(l.clone()),
        Pattern::Tuple(ps) => ExprKind::Tuple(ps.iter().map(|p| pattern_expr(p, loc)).collect::<Option<_>>()?),
        Pattern::Record(n, ps) => ExprKind::Record {
            name: n.clone(),
            fields: ps.iter().map(|p| pattern_expr(p, loc)).collect::<Option<_>>()?,
        },
        Pattern::SeqEnum(ps) => ExprKind::SeqEnum(ps.iter().map(|p| pattern_expr(p, loc)).collect::<Option<_>>()?),
    };
    Some(Expr::new(kind, loc.clone()))
}

/// Replaces don't-care patterns with fresh names so that every parameter
/// can be passed on to `pre_f`.
fn name_ignored(p: &Pattern, taken: &mut BTreeSet<String>) -> Pattern {
    match p {
        Pattern::Ignore => {
            let mut i = 1;
            while taken.contains(&format!("any{i}")) {
                i += 1;
            }
            let n = format!("any{i}");
            taken.insert(n.clone());
            Pattern::Ident(n)
        }
        Pattern::Tuple(ps) => Pattern::Tuple(ps.iter().map(|p| name_ignored(p, taken)).collect()),
        Pattern::Record(n, ps) => Pattern::Record(n.clone(), ps.iter().map(|p| name_ignored(p, taken)).collect()),
        Pattern::SeqEnum(ps) => Pattern::SeqEnum(ps.iter().map(|p| name_ignored(p, taken)).collect()),
        other => other.clone(),
    }
}

impl<'m> Gen<'m> {
    fn function(&mut self, f: &'m FunctionDef) {
        let mut taken: BTreeSet<String> = free_names(&f.body);
        taken.extend(f.params.iter().flat_map(|p| p.variables()));
        let params: Vec<Pattern> = f.params.iter().map(|p| name_ignored(p, &mut taken)).collect();
        let binds: Vec<Bind> = params
            .iter()
            .zip(&f.param_types)
            .map(|(p, t)| Bind::Type {
                pattern: p.clone(),
                ty: t.clone(),
            })
            .collect();
        let args: Vec<Expr> = params.iter().filter_map(|p| pattern_expr(p, &f.loc)).collect();
        self.owner = Owner {
            name: f.name.clone(),
            patterns: params.clone(),
            params: binds,
            pre: None,
            type_params: f.type_params.clone(),
        };
        self.env.push();
        for (p, t) in params.iter().zip(&f.param_types) {
            let _ = self.env.bind_pattern(p, t, &f.loc);
        }
        if let Some(pre) = &f.pre {
            self.walk(pre, None);
            self.owner.pre = Some(Expr::call(format!("pre_{}", f.name), args.clone(), f.loc.clone()));
        }
        self.walk(&f.body, Some(&f.return_type));
        if let Some(post) = &f.post {
            self.env.push();
            self.env.bind("RESULT", f.return_type.clone());
            self.guards.push(Guard::Let(vec![(Pattern::Ident("RESULT".into()), f.body.clone())]));
            self.walk(post, None);
            self.guards.pop();
            self.env.pop();
            let mut post_args = args.clone();
            post_args.push(f.body.clone());
            let call = Expr::call(format!("post_{}", f.name), post_args, f.loc.clone());
            let text = call.to_string();
            self.emit(PoKind::PostCondition, &f.loc, call, text, false, None);
        }
        self.env.pop();
    }

    fn value(&mut self, i: usize) {
        let v = &self.module.values[i];
        self.owner = Owner {
            name: v.name.clone(),
            patterns: Vec::new(),
            params: Vec::new(),
            pre: None,
            type_params: Vec::new(),
        };
        self.walk(&v.value, v.ty.as_ref());
    }

    fn type_invariant(&mut self, i: usize) {
        let t = &self.module.types[i];
        let (TypeBody::Alias(under), Some((p, inv))) = (&t.body, &t.invariant) else {
            return;
        };
        self.owner = Owner {
            name: format!("inv_{}", t.name),
            patterns: vec![p.clone()],
            params: vec![Bind::Type {
                pattern: p.clone(),
                ty: under.clone(),
            }],
            pre: None,
            type_params: Vec::new(),
        };
        self.env.push();
        let _ = self.env.bind_pattern(p, under, &t.loc);
        self.walk(inv, None);
        self.env.pop();
    }

    fn state(&mut self) {
        let Some(s) = &self.module.state else {
            return;
        };
        let (Some((ip, init)), Some((vp, inv))) = (&s.init, &s.invariant) else {
            return;
        };
        self.owner = Owner {
            name: s.name.clone(),
            patterns: Vec::new(),
            params: vec![Bind::Type {
                pattern: ip.clone(),
                ty: TypeExpr::Named(s.name.clone()),
            }],
            pre: None,
            type_params: Vec::new(),
        };
        let Some(arg) = pattern_expr(ip, &s.loc) else {
            return;
        };
        let obligation = Expr::new(
            ExprKind::Let {
                defs: vec![(vp.clone(), arg)],
                body: Box::new(inv.clone()),
            },
            inv.loc.clone(),
        );
        self.guards.push(Guard::Cond(init.clone()));
        let text = format!("({obligation})");
        self.emit(PoKind::StateInvariant, &s.loc, obligation, text, false, None);
        self.guards.pop();
        if let Some(po) = self.out.last_mut() {
            po.executable = false;
        }
    }

    /// Records an obligation under the current guards and owner.
    fn emit(&mut self, kind: PoKind, loc: &Location, obligation: Expr, text: String, on_result: bool, subject_type: Option<TypeExpr>) {
        let mut expr = obligation;
        let mut text = text;
        for g in self.guards.iter().rev() {
            let (e, t) = g.wrap(expr, &text);
            expr = e;
            text = t;
        }
        if let Some(pre) = &self.owner.pre {
            text = format!("{pre} => {text}");
            expr = Expr::new(
                ExprKind::Binary {
                    op: BinaryOp::Implies,
                    left: Box::new(pre.clone()),
                    right: Box::new(expr),
                },
                loc.clone(),
            );
        }
        let mut polarity = Polarity::Universal;
        if self.owner.params.is_empty() {
            if let ExprKind::Exists { binds, body } = &expr.kind {
                polarity = Polarity::Existential;
                text = format!("(exists {} &\n  {})", binds_list(binds), body);
            }
        } else {
            let indent = if self.owner.pre.is_some() { "    " } else { "  " };
            text = format!("(forall {} &\n{indent}{text})", binds_list(&self.owner.params));
            expr = Expr::new(
                ExprKind::Forall {
                    binds: self.owner.params.clone(),
                    body: Box::new(expr),
                },
                loc.clone(),
            );
        }
        let executable = !self.reads_state(&expr);
        self.out.push(ProofObligation {
            number: 0,
            kind,
            owner: self.owner.name.clone(),
            loc: loc.clone(),
            expr,
            text,
            polarity,
            executable,
            type_params: self.owner.type_params.clone(),
            on_result,
            params: self.owner.patterns.clone(),
            subject_type,
        });
    }

    fn reads_state(&self, e: &Expr) -> bool {
        free_names(e).iter().any(|n| {
            (self.module.state_field(n).is_some() && self.module.value_def(n).is_none())
                || self.state_dependent.contains(base_function(n))
        })
    }

    fn with_guard(&mut self, g: Guard, f: impl FnOnce(&mut Self)) {
        self.guards.push(g);
        f(self);
        self.guards.pop();
    }

    fn with_scope(&mut self, bind: impl FnOnce(&mut TypeEnv<'m>), f: impl FnOnce(&mut Self)) {
        self.env.push();
        bind(&mut self.env);
        f(self);
        self.env.pop();
    }

    /// Walks `e`. `result` is the declared type `e` must belong to when it
    /// is (a branch of) a definition's result.
    fn walk(&mut self, e: &Expr, result: Option<&TypeExpr>) {
        match &e.kind {
            ExprKind::Literal(_) | ExprKind::Name(_) | ExprKind::Instantiate { .. } => {}
            ExprKind::Unary { op, operand } => {
                if matches!(op, UnaryOp::Hd | UnaryOp::Tl) {
                    let empty = Expr::new(ExprKind::SeqEnum(Vec::new()), e.loc.clone());
                    let ob = Expr::new(
                        ExprKind::Binary {
                            op: BinaryOp::Ne,
                            left: operand.clone(),
                            right: Box::new(empty),
                        },
                        e.loc.clone(),
                    );
                    self.emit_simple(PoKind::NonEmptySeq, &e.loc, ob);
                }
                self.walk(operand, None);
            }
            ExprKind::Binary { op, left, right } => {
                let literal_nonzero = match &right.kind {
                    ExprKind::Literal(Literal::Int(i)) => i.sign() != num_bigint::Sign::NoSign,
                    ExprKind::Literal(Literal::Real(r)) => !num_traits::Zero::is_zero(r),
                    _ => false,
                };
                if matches!(op, BinaryOp::Div | BinaryOp::IntDiv | BinaryOp::Mod | BinaryOp::Rem) && !literal_nonzero {
                    let zero = int_literal(0, e.loc.clone());
                    let ob = Expr::new(
                        ExprKind::Binary {
                            op: BinaryOp::Ne,
                            left: right.clone(),
                            right: Box::new(zero),
                        },
                        e.loc.clone(),
                    );
                    self.emit_simple(PoKind::NonZero, &e.loc, ob);
                }
                self.walk(left, None);
                match op {
                    BinaryOp::And | BinaryOp::Implies => {
                        self.with_guard(Guard::Cond((**left).clone()), |g| g.walk(right, None))
                    }
                    BinaryOp::Or => self.with_guard(Guard::Cond(negate(left)), |g| g.walk(right, None)),
                    _ => self.walk(right, None),
                }
            }
            ExprKind::If {
                cond,
                then,
                elifs,
                otherwise,
            } => {
                self.walk(cond, None);
                self.with_guard(Guard::Cond((**cond).clone()), |g| g.walk(then, result));
                let mut negated = vec![Guard::Cond(negate(cond))];
                for (c, b) in elifs {
                    let depth = self.guards.len();
                    self.guards.extend(negated.iter().cloned());
                    self.walk(c, None);
                    self.with_guard(Guard::Cond(c.clone()), |g| g.walk(b, result));
                    self.guards.truncate(depth);
                    negated.push(Guard::Cond(negate(c)));
                }
                let depth = self.guards.len();
                self.guards.extend(negated);
                self.walk(otherwise, result);
                self.guards.truncate(depth);
            }
            ExprKind::Cases {
                scrutinee,
                alts,
                others,
            } => {
                self.walk(scrutinee, None);
                let st = self.env.infer(scrutinee).unwrap_or(TypeExpr::Any);
                if others.is_none() {
                    let ob = exhaustive_condition(scrutinee, alts, &e.loc);
                    let text = ob.to_string();
                    self.emit(PoKind::CasesExhaustive, &e.loc, ob, text, false, Some(st.clone()));
                }
                let mut earlier: Vec<Vec<Pattern>> = Vec::new();
                for alt in alts {
                    let guard = Guard::Cases {
                        scrutinee: (**scrutinee).clone(),
                        earlier: earlier.clone(),
                        pats: Some(alt.patterns.clone()),
                    };
                    self.with_guard(guard, |g| {
                        g.with_scope(
                            |env| {
                                for p in &alt.patterns {
                                    let _ = env.bind_pattern(p, &st, &alt.body.loc);
                                }
                            },
                            |g| g.walk(&alt.body, result),
                        )
                    });
                    earlier.push(alt.patterns.clone());
                }
                if let Some(o) = others {
                    let guard = Guard::Cases {
                        scrutinee: (**scrutinee).clone(),
                        earlier,
                        pats: None,
                    };
                    self.with_guard(guard, |g| g.walk(o, result));
                }
            }
            ExprKind::Let { defs, body } => {
                self.env.push();
                let depth = self.guards.len();
                for (p, v) in defs {
                    self.walk(v, None);
                    let t = self.env.infer(v).unwrap_or(TypeExpr::Any);
                    let _ = self.env.bind_pattern(p, &t, &v.loc);
                    self.guards.push(Guard::Let(vec![(p.clone(), v.clone())]));
                }
                self.walk(body, result);
                self.guards.truncate(depth);
                self.env.pop();
            }
            ExprKind::LetBe { bind, st, body } => {
                let ob = Expr::new(
                    ExprKind::Exists {
                        binds: vec![bind.clone()],
                        body: Box::new(st.as_deref().cloned().unwrap_or_else(|| Expr::bool(true, e.loc.clone()))),
                    },
                    e.loc.clone(),
                );
                self.emit_simple(PoKind::LetBeExists, &e.loc, ob);
                if let Bind::Set { set, .. } = bind {
                    self.walk(set, None);
                }
                let binds = vec![bind.clone()];
                self.with_scope(
                    |env| {
                        let _ = env.bind_all(&binds, &e.loc);
                    },
                    |g| {
                        g.with_guard(Guard::Binds(binds.clone()), |g| match st {
                            Some(s) => {
                                g.walk(s, None);
                                g.with_guard(Guard::Cond((**s).clone()), |g| g.walk(body, result));
                            }
                            None => g.walk(body, result),
                        })
                    },
                );
            }
            ExprKind::Forall { binds, body } | ExprKind::Exists { binds, body } => {
                self.walk_binds(binds, &e.loc, None, |g| g.walk(body, None));
            }
            ExprKind::SetComp { elem, binds, pred } => {
                self.walk_binds(binds, &e.loc, pred.as_deref(), |g| g.walk(elem, None));
            }
            ExprKind::SeqComp { elem, bind, pred } => {
                self.walk_binds(std::slice::from_ref(&**bind), &e.loc, pred.as_deref(), |g| g.walk(elem, None));
            }
            ExprKind::Apply { callee, args } => {
                self.walk_apply(e, callee, args);
            }
            ExprKind::Record { name, fields } => {
                for f in fields {
                    self.walk(f, None);
                }
                let decl: Vec<TypeExpr> = self
                    .env
                    .record_fields(name)
                    .map(|fs| fs.iter().map(|(_, t)| t.clone()).collect())
                    .unwrap_or_default();
                let narrowing = fields.iter().zip(&decl).any(|(f, t)| !self.statically_within(f, t));
                let has_inv = self.module.type_def(name).is_some_and(|d| d.invariant.is_some());
                if narrowing || has_inv {
                    self.emit_subtype(e, &TypeExpr::Named(name.clone()), false);
                }
            }
            _ => {
                for c in e.children() {
                    self.walk(c, None);
                }
            }
        }
        if let Some(target) = result {
            if !is_branching(e) && !self.statically_within(e, target) {
                self.emit_subtype(e, target, true);
            }
        }
    }

    fn walk_binds(&mut self, binds: &[Bind], loc: &Location, pred: Option<&Expr>, inner: impl FnOnce(&mut Self)) {
        for b in binds {
            if let Bind::Set { set, .. } = b {
                self.walk(set, None);
            }
        }
        let owned = binds.to_vec();
        self.with_scope(
            |env| {
                let _ = env.bind_all(&owned, loc);
            },
            |g| {
                g.with_guard(Guard::Binds(owned.clone()), |g| match pred {
                    Some(p) => {
                        g.walk(p, None);
                        g.with_guard(Guard::Cond(p.clone()), inner);
                    }
                    None => inner(g),
                })
            },
        );
    }

    fn walk_apply(&mut self, e: &Expr, callee: &Expr, args: &[Expr]) {
        match self.env.apply_kind(callee) {
            Some(kind) => {
                let (op, po_kind) = match kind {
                    ApplyKind::Seq => (UnaryOp::Inds, PoKind::SeqApply),
                    ApplyKind::Map => (UnaryOp::Dom, PoKind::MapApply),
                };
                if let Some(arg) = args.first() {
                    let collection = Expr::new(
                        ExprKind::Unary {
                            op,
                            operand: Box::new(callee.clone()),
                        },
                        e.loc.clone(),
                    );
                    let ob = Expr::new(
                        ExprKind::Binary {
                            op: BinaryOp::InSet,
                            left: Box::new(arg.clone()),
                            right: Box::new(collection),
                        },
                        e.loc.clone(),
                    );
                    self.emit_simple(po_kind, &e.loc, ob);
                }
                self.walk(callee, None);
                for a in args {
                    self.walk(a, None);
                }
            }
            None => {
                for a in args {
                    self.walk(a, None);
                }
                let (name, type_args) = match &callee.kind {
                    ExprKind::Name(n) => (n.as_str(), None),
                    ExprKind::Instantiate { name, type_args } => (name.as_str(), Some(type_args)),
                    _ => {
                        self.walk(callee, None);
                        return;
                    }
                };
                let Some(f) = self.module.function(name) else {
                    return;
                };
                for (a, t) in args.iter().zip(&f.param_types) {
                    let target = match type_args {
                        Some(ta) => t.substitute(&|p| {
                            f.type_params.iter().position(|q| q == p).and_then(|i| ta.get(i).cloned())
                        }),
                        None => t.clone(),
                    };
                    if target.has_type_params() {
                        continue;
                    }
                    if !self.statically_within(a, &target) {
                        self.emit_subtype(a, &target, false);
                    }
                }
            }
        }
    }

    fn statically_within(&mut self, e: &Expr, target: &TypeExpr) -> bool {
        match self.env.infer(e) {
            Ok(t) => self.env.is_subtype(&t, target),
            Err(_) => true,
        }
    }

    fn emit_subtype(&mut self, e: &Expr, target: &TypeExpr, on_result: bool) {
        let ob = Expr::new(
            ExprKind::IsType {
                expr: Box::new(e.clone()),
                ty: target.clone(),
            },
            e.loc.clone(),
        );
        let text = ob.to_string();
        let subject = self.env.infer(e).ok();
        self.emit(PoKind::Subtype, &e.loc, ob, text, on_result, subject);
    }

    fn emit_simple(&mut self, kind: PoKind, loc: &Location, ob: Expr) {
        let text = ob.to_string();
        self.emit(kind, loc, ob, text, false, None);
    }
}

fn binds_list(binds: &[Bind]) -> String {
    binds.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", ")
}

/// Constructs whose branches carry the result, checked individually.
fn is_branching(e: &Expr) -> bool {
    matches!(
        e.kind,
        ExprKind::If { .. } | ExprKind::Cases { .. } | ExprKind::Let { .. } | ExprKind::LetBe { .. }
    )
}

fn negate(e: &Expr) -> Expr {
    Expr::new(
        ExprKind::Unary {
            op: UnaryOp::Not,
            operand: Box::new(e.clone()),
        },
        e.loc.clone(),
    )
}

/// `s = lit` for literal patterns and `exists p in set {s} & true` for the
/// rest, joined with `or`.
fn exhaustive_condition(scrutinee: &Expr, alts: &[CaseAlt], loc: &Location) -> Expr {
    let mut disjuncts = Vec::new();
    for alt in alts {
        for p in &alt.patterns {
            let d = match p {
                Pattern::Literal(l) => Expr::new(
                    ExprKind::Binary {
                        op: BinaryOp::Eq,
                        left: Box::new(scrutinee.clone()),
                        right: Box::new(Expr::new(ExprKind::Literal(l.clone()), loc.clone())),
                    },
                    loc.clone(),
                ),
                _ => Expr::new(
                    ExprKind::Exists {
                        binds: vec![Bind::Set {
                            pattern: p.clone(),
                            set: Box::new(Expr::new(ExprKind::SetEnum(vec![scrutinee.clone()]), loc.clone())),
                        }],
                        body: Box::new(Expr::bool(true, loc.clone())),
                    },
                    loc.clone(),
                ),
            };
            disjuncts.push(d);
        }
    }
    let mut it = disjuncts.into_iter();
    let first = it.next().unwrap_or_else(|| Expr::bool(false, loc.clone()));
    it.fold(first, |acc, d| {
        Expr::new(
            ExprKind::Binary {
                op: BinaryOp::Or,
                left: Box::new(acc),
                right: Box::new(d),
            },
            loc.clone(),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{check_module, parse_expression, parse_specification};
    use crate::pog::render_pog;

    fn pos(src: &str) -> Vec<ProofObligation> {
        let m = check_module(parse_specification(src, "test.vdmsl").unwrap()).unwrap();
        generate_pos(&m)
    }

    fn one(src: &str) -> String {
        let ps = pos(src);
        assert_eq!(ps.len(), 1, "{}", render_pog(&ps));
        render_pog(&ps)
    }

    #[test]
    fn unguarded_sequence_apply() {
        let out = one("functions\n    itemAt: seq of nat * nat -> nat\n    itemAt(list, index) == list(index);\n");
        assert_eq!(
            out,
            "Generated 1 proof obligation:\n\nProof Obligation 1: (Unproved)\n\
             itemAt: sequence apply obligation in test.vdmsl at line 3:28\n\
             (forall list:seq of nat, index:nat &\n  index in set inds list)\n"
        );
    }

    #[test]
    fn precondition_guard() {
        let out = one(
            "functions\n    itemAt: seq of nat * nat -> nat\n    itemAt(list, index) == list(index)\n    pre index in set inds list;\n",
        );
        assert!(out.ends_with(
            "at line 3:28\n(forall list:seq of nat, index:nat &\n    pre_itemAt(list, index) => index in set inds list)\n"
        ));
    }

    #[test]
    fn if_guard() {
        let out = one(
            "functions\n    itemAt: seq of nat * nat -> nat\n    itemAt(list, index) ==\n        if index in set inds list\n        then list(index)\n        else 0;\n",
        );
        assert!(out.ends_with(
            "at line 5:14\n(forall list:seq of nat, index:nat &\n  ((index in set (inds list)) => index in set inds list))\n"
        ));
    }

    #[test]
    fn polymorphic_parameters() {
        let ps = pos("functions\n    f[@T]: seq of @T * nat -> @T\n    f(s, i) == s(i);\n");
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].locator(), "f: sequence apply obligation in test.vdmsl at line 3:16");
        assert_eq!(ps[0].text, "(forall s:seq of (@T), i:nat &\n  i in set inds s)");
        assert_eq!(ps[0].type_params, ["T"]);
    }

    #[test]
    fn total_function_has_no_obligations() {
        assert!(pos("functions\n  f: bool -> bool\n  f(b) == not b;\n").is_empty());
        assert_eq!(
            render_pog(&[]),
            "Generated 0 proof obligations:\n"
        );
    }

    #[test]
    fn cases_and_let_be() {
        let ps = pos(
            "functions\n  g: nat -> nat\n  g(n) == cases n:\n    0 -> 1,\n    1 -> 2\n  end;\n  h: set of nat -> nat\n  h(s) == let x in set s be st x > 2 in x;\n",
        );
        let kinds: Vec<PoKind> = ps.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, [PoKind::CasesExhaustive, PoKind::LetBeExists]);
        assert_eq!(ps[0].loc.line, 3);
        assert_eq!(ps[0].text, "(forall n:nat &\n  n = 0 or n = 1)");
        assert_eq!(ps[1].text, "(forall s:set of nat &\n  exists x in set s & x > 2)");
        assert_eq!(ps[1].number, 2);
    }

    #[test]
    fn division_and_subtypes() {
        let ps = pos("functions\n  d: int * int -> nat\n  d(a, b) == a div b;\n");
        let kinds: Vec<PoKind> = ps.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, [PoKind::NonZero, PoKind::Subtype]);
        assert!(ps[1].on_result);
        assert!(ps[0].text.ends_with("b <> 0)"));
    }

    #[test]
    fn guards_nest_in_order() {
        let ps = pos("functions\n  k: seq of nat -> nat\n  k(s) == let t = tl s in if t <> [] then hd t else 0;\n");
        let kinds: Vec<PoKind> = ps.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, [PoKind::NonEmptySeq, PoKind::NonEmptySeq]);
        assert!(ps[1].text.contains("(let t = tl s in ((t <> []) => t <> []))"), "{}", ps[1].text);
    }

    #[test]
    fn texts_reparse_to_the_obligation() {
        let ps = pos(
            "functions\n  f: seq of nat * nat -> nat\n  f(s, i) == if i in set inds s then s(i) div i else let x in set elems s be st x > i in x\n  pre len s > 0\n  post RESULT >= 0;\n",
        );
        assert!(ps.len() >= 4);
        for p in &ps {
            let reparsed = parse_expression(&p.text, "t").unwrap();
            assert_eq!(reparsed, p.expr, "{}", p.text);
            let bound: BTreeSet<String> = p.type_binds().iter().flat_map(|(pat, _)| pat.variables()).collect();
            for n in free_names(&p.expr) {
                assert!(bound.contains(&n) || n.starts_with("pre_") || n.starts_with("post_") || n == "f", "{n}");
            }
        }
    }

    #[test]
    fn state_obligations_are_not_executable() {
        let ps = pos(
            "state S of\n  c : nat\ninv mk_S(c) == c < 10\ninit s == s = mk_S(0)\nend\nfunctions\n  f: nat -> nat\n  f(n) == n div c;\n",
        );
        assert!(ps.iter().all(|p| !p.executable), "{}", render_pog(&ps));
        assert!(ps.iter().any(|p| p.kind == PoKind::StateInvariant));
    }
}
