//! Static checking: name resolution and a lenient VDM-style type inference.
//!
//! Two relations are used. `compatible` asks whether two types can share a
//! value and drives error reporting. `is_subtype` asks whether every value of
//! one type belongs to another and decides where subtype obligations are
//! needed.

use std::collections::HashMap;
use std::fmt;

use num_traits::Signed;
use thiserror::Error;

use super::ast::*;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} in {loc}")]
pub struct TypeError {
    pub loc: Location,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct TypeErrors(pub Vec<TypeError>);

impl fmt::Display for TypeErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "Error: {e}")?;
        }
        Ok(())
    }
}

type TResult<T> = Result<T, TypeError>;

fn err<T>(loc: &Location, message: impl Into<String>) -> TResult<T> {
    Err(TypeError {
        loc: loc.clone(),
        message: message.into(),
    })
}

/// Checks a parsed module. The returned module is marked checked; checking
/// it again yields the same result.
pub fn check_module(mut m: SpecModule) -> Result<SpecModule, TypeErrors> {
    let mut errors = Vec::new();
    let mut env = TypeEnv::new(&m);

    for t in &m.types {
        match &t.body {
            TypeBody::Alias(ty) => env.check_type(ty, &[], &t.loc, &mut errors),
            TypeBody::Record(fields) => {
                for (_, ty) in fields {
                    env.check_type(ty, &[], &t.loc, &mut errors);
                }
            }
        }
        if let Some((p, e)) = &t.invariant {
            env.check_bool_in(&[(p, t.underlying())], e, &mut errors);
        }
    }
    for v in &m.values {
        if let Some(ty) = &v.ty {
            env.check_type(ty, &[], &v.loc, &mut errors);
        }
        match env.infer(&v.value) {
            Ok(actual) => {
                if let Some(ty) = &v.ty {
                    if !env.compatible(&actual, ty) {
                        errors.push(TypeError {
                            loc: v.value.loc.clone(),
                            message: format!("value {} has type {actual}, expected {ty}", v.name),
                        });
                    }
                }
            }
            Err(e) => errors.push(e),
        }
    }
    for f in &m.functions {
        for t in f.param_types.iter().chain(std::iter::once(&f.return_type)) {
            env.check_type(t, &f.type_params, &f.loc, &mut errors);
        }
        let params: Vec<(&Pattern, TypeExpr)> =
            f.params.iter().zip(f.param_types.iter().cloned()).collect();
        if let Some(pre) = &f.pre {
            env.check_bool_in(&params, pre, &mut errors);
        }
        env.push();
        let bound = params
            .iter()
            .try_for_each(|(p, t)| env.bind_pattern(p, t, &f.loc));
        match bound.and_then(|_| env.infer(&f.body)) {
            Ok(actual) => {
                if !env.compatible(&actual, &f.return_type) {
                    errors.push(TypeError {
                        loc: f.body.loc.clone(),
                        message: format!(
                            "function {} returns {actual}, expected {}",
                            f.name, f.return_type
                        ),
                    });
                }
            }
            Err(e) => errors.push(e),
        }
        env.pop();
        if let Some(post) = &f.post {
            let result = Pattern::Ident("RESULT".into());
            let mut scope = params.clone();
            scope.push((&result, f.return_type.clone()));
            env.check_bool_in(&scope, post, &mut errors);
        }
    }
    if let Some(s) = &m.state {
        for (_, ty) in &s.fields {
            env.check_type(ty, &[], &s.loc, &mut errors);
        }
        let state_ty = TypeExpr::Named(s.name.clone());
        for (p, e) in s.invariant.iter().chain(s.init.iter()) {
            env.check_bool_in(&[(p, state_ty.clone())], e, &mut errors);
        }
    }
    drop(env);
    if errors.is_empty() {
        m.checked = true;
        Ok(m)
    } else {
        Err(TypeErrors(errors))
    }
}

/// Scoped type environment over a module.
pub struct TypeEnv<'m> {
    module: &'m SpecModule,
    scopes: Vec<Vec<(String, TypeExpr)>>,
    value_types: HashMap<String, TypeExpr>,
}

impl<'m> TypeEnv<'m> {
    pub fn new(module: &'m SpecModule) -> Self {
        let mut env = TypeEnv {
            module,
            scopes: vec![Vec::new()],
            value_types: HashMap::new(),
        };
        for v in &module.values {
            let ty = match &v.ty {
                Some(t) => t.clone(),
                None => env.infer(&v.value).unwrap_or(TypeExpr::Any),
            };
            env.value_types.insert(v.name.clone(), ty);
        }
        env
    }

    pub fn module(&self) -> &'m SpecModule {
        self.module
    }

    pub fn push(&mut self) {
        self.scopes.push(Vec::new());
    }

    pub fn pop(&mut self) {
        self.scopes.pop();
    }

    pub fn bind(&mut self, name: &str, ty: TypeExpr) {
        if let Some(scope) = self.scopes.last_mut() {
            scope.push((name.to_string(), ty));
        }
    }

    /// Type of a variable in scope, a state field, or a value definition.
    pub fn lookup(&self, name: &str) -> Option<TypeExpr> {
        for scope in self.scopes.iter().rev() {
            if let Some((_, t)) = scope.iter().rev().find(|(n, _)| n == name) {
                return Some(t.clone());
            }
        }
        if let Some(t) = self.module.state_field(name) {
            return Some(t.clone());
        }
        self.value_types.get(name).cloned()
    }

    fn is_local(&self, name: &str) -> bool {
        self.scopes.iter().any(|s| s.iter().any(|(n, _)| n == name))
    }

    fn check_type(&self, t: &TypeExpr, params: &[String], loc: &Location, errors: &mut Vec<TypeError>) {
        match t {
            TypeExpr::Named(n) => {
                if self.module.type_def(n).is_none() {
                    errors.push(TypeError {
                        loc: loc.clone(),
                        message: format!("unknown type {n}"),
                    });
                }
            }
            TypeExpr::TypeParam(p) => {
                if !params.contains(p) {
                    errors.push(TypeError {
                        loc: loc.clone(),
                        message: format!("unknown type parameter @{p}"),
                    });
                }
            }
            TypeExpr::Seq(e) | TypeExpr::Set(e) | TypeExpr::Optional(e) => {
                self.check_type(e, params, loc, errors)
            }
            TypeExpr::Map(d, r) => {
                self.check_type(d, params, loc, errors);
                self.check_type(r, params, loc, errors);
            }
            TypeExpr::Product(ts) | TypeExpr::Union(ts) => {
                ts.iter().for_each(|t| self.check_type(t, params, loc, errors))
            }
            _ => {}
        }
    }

    fn check_bool_in(&mut self, scope: &[(&Pattern, TypeExpr)], e: &Expr, errors: &mut Vec<TypeError>) {
        self.push();
        let r = scope
            .iter()
            .try_for_each(|(p, t)| self.bind_pattern(p, t, &e.loc))
            .and_then(|_| self.infer(e));
        match r {
            Ok(t) => {
                if !self.compatible(&t, &TypeExpr::Bool) {
                    errors.push(TypeError {
                        loc: e.loc.clone(),
                        message: format!("expected a bool expression, found {t}"),
                    });
                }
            }
            Err(e) => errors.push(e),
        }
        self.pop();
    }

    /// Resolves alias names (not records) to their definitions.
    pub fn resolve(&self, t: &TypeExpr) -> TypeExpr {
        let mut t = t.clone();
        for _ in 0..32 {
            match &t {
                TypeExpr::Named(n) => match self.module.type_def(n).map(|d| &d.body) {
                    Some(TypeBody::Alias(inner)) => t = inner.clone(),
                    _ => return t,
                },
                _ => return t,
            }
        }
        t
    }

    /// Field list of a record type or of the state.
    pub fn record_fields(&self, name: &str) -> Option<&'m [(String, TypeExpr)]> {
        if let Some(TypeDef {
            body: TypeBody::Record(fields),
            ..
        }) = self.module.type_def(name)
        {
            return Some(fields);
        }
        match &self.module.state {
            Some(s) if s.name == name => Some(&s.fields),
            _ => None,
        }
    }

    /// Binds the variables of `p` matched against a value of type `t`.
    pub fn bind_pattern(&mut self, p: &Pattern, t: &TypeExpr, loc: &Location) -> TResult<()> {
        match p {
            Pattern::Ident(n) => {
                self.bind(n, t.clone());
                Ok(())
            }
            Pattern::Ignore => Ok(()),
            Pattern::Literal(l) => {
                let lt = literal_type(l);
                if self.compatible(&lt, t) {
                    Ok(())
                } else {
                    err(loc, format!("pattern {p} cannot match type {t}"))
                }
            }
            Pattern::Tuple(ps) => {
                let comps = match self.resolve(t) {
                    TypeExpr::Product(ts) if ts.len() == ps.len() => ts,
                    TypeExpr::Any => vec![TypeExpr::Any; ps.len()],
                    other => return err(loc, format!("pattern {p} cannot match type {other}")),
                };
                for (p, t) in ps.iter().zip(comps.iter()) {
                    self.bind_pattern(p, t, loc)?;
                }
                Ok(())
            }
            Pattern::Record(name, ps) => {
                let Some(fields) = self.record_fields(name) else {
                    return err(loc, format!("unknown record type {name}"));
                };
                if fields.len() != ps.len() {
                    return err(loc, format!("record {name} has {} fields", fields.len()));
                }
                for (p, (_, t)) in ps.iter().zip(fields.iter()) {
                    self.bind_pattern(p, t, loc)?;
                }
                Ok(())
            }
            Pattern::SeqEnum(ps) => {
                let elem = self.seq_elem(t).unwrap_or(TypeExpr::Any);
                for p in ps {
                    self.bind_pattern(p, &elem, loc)?;
                }
                Ok(())
            }
        }
    }

    /// Element type of a bind, after checking a set bind's set expression.
    pub fn bind_elem_type(&mut self, b: &Bind, loc: &Location) -> TResult<TypeExpr> {
        match b {
            Bind::Type { ty, .. } => Ok(ty.clone()),
            Bind::Set { set, .. } => {
                let st = self.infer(set)?;
                match self.set_elem(&st) {
                    Some(e) => Ok(e),
                    None => err(loc, format!("expected a set, found {st}")),
                }
            }
        }
    }

    pub fn bind_all(&mut self, binds: &[Bind], loc: &Location) -> TResult<()> {
        for b in binds {
            let t = self.bind_elem_type(b, loc)?;
            self.bind_pattern(b.pattern(), &t, loc)?;
        }
        Ok(())
    }

    fn seq_elem(&self, t: &TypeExpr) -> Option<TypeExpr> {
        match self.resolve(t) {
            TypeExpr::Seq(e) => Some(*e),
            TypeExpr::Any => Some(TypeExpr::Any),
            TypeExpr::Union(ts) => self.join_all(ts.iter().map(|t| self.seq_elem(t))),
            _ => None,
        }
    }

    fn set_elem(&self, t: &TypeExpr) -> Option<TypeExpr> {
        match self.resolve(t) {
            TypeExpr::Set(e) => Some(*e),
            TypeExpr::Any => Some(TypeExpr::Any),
            TypeExpr::Union(ts) => self.join_all(ts.iter().map(|t| self.set_elem(t))),
            _ => None,
        }
    }

    fn map_parts(&self, t: &TypeExpr) -> Option<(TypeExpr, TypeExpr)> {
        match self.resolve(t) {
            TypeExpr::Map(d, r) => Some((*d, *r)),
            TypeExpr::Any => Some((TypeExpr::Any, TypeExpr::Any)),
            TypeExpr::Union(ts) => {
                let parts: Option<Vec<_>> = ts.iter().map(|t| self.map_parts(t)).collect();
                let parts = parts?;
                let d = self.join_all(parts.iter().map(|(d, _)| Some(d.clone())))?;
                let r = self.join_all(parts.iter().map(|(_, r)| Some(r.clone())))?;
                Some((d, r))
            }
            _ => None,
        }
    }

    fn join_all(&self, ts: impl Iterator<Item = Option<TypeExpr>>) -> Option<TypeExpr> {
        let mut acc: Option<TypeExpr> = None;
        for t in ts {
            let t = t?;
            acc = Some(match acc {
                None => t,
                Some(a) => self.join(&a, &t),
            });
        }
        acc
    }

    /// 0 for nat1 up to 3 for real; `None` if not numeric.
    fn numeric_rank(&self, t: &TypeExpr) -> Option<u8> {
        match self.resolve(t) {
            TypeExpr::Nat1 => Some(0),
            TypeExpr::Nat => Some(1),
            TypeExpr::Int => Some(2),
            TypeExpr::Real | TypeExpr::Any => Some(3),
            TypeExpr::Union(ts) => ts.iter().map(|t| self.numeric_rank(t)).try_fold(0, |a, r| r.map(|r| a.max(r))),
            _ => None,
        }
    }

    /// True if the two types may share a value.
    pub fn compatible(&self, a: &TypeExpr, b: &TypeExpr) -> bool {
        self.compatible_depth(a, b, 0)
    }

    fn compatible_depth(&self, a: &TypeExpr, b: &TypeExpr, depth: u32) -> bool {
        if depth > 32 || a == b {
            return true;
        }
        let ra = self.resolve(a);
        let rb = self.resolve(b);
        let d = depth + 1;
        match (&ra, &rb) {
            (TypeExpr::Any, _) | (_, TypeExpr::Any) => true,
            (TypeExpr::Union(ts), other) | (other, TypeExpr::Union(ts)) => {
                ts.iter().any(|t| self.compatible_depth(t, other, d))
            }
            (TypeExpr::Optional(x), TypeExpr::Optional(y)) => self.compatible_depth(x, y, d),
            (TypeExpr::Optional(x), other) | (other, TypeExpr::Optional(x)) => {
                self.compatible_depth(x, other, d)
            }
            (x, y) if x.is_numeric() && y.is_numeric() => true,
            (TypeExpr::Seq(x), TypeExpr::Seq(y)) | (TypeExpr::Set(x), TypeExpr::Set(y)) => {
                self.compatible_depth(x, y, d)
            }
            (TypeExpr::Map(d1, r1), TypeExpr::Map(d2, r2)) => {
                self.compatible_depth(d1, d2, d) && self.compatible_depth(r1, r2, d)
            }
            (TypeExpr::Product(xs), TypeExpr::Product(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.compatible_depth(x, y, d))
            }
            _ => ra == rb,
        }
    }

    /// True if every value of `a` is a value of `b`, invariants included.
    pub fn is_subtype(&self, a: &TypeExpr, b: &TypeExpr) -> bool {
        self.subtype_depth(a, b, 0)
    }

    fn has_invariant(&self, name: &str) -> bool {
        self.module
            .type_def(name)
            .is_some_and(|d| d.invariant.is_some())
    }

    fn subtype_depth(&self, a: &TypeExpr, b: &TypeExpr, depth: u32) -> bool {
        if a == b || matches!(a, TypeExpr::Any) {
            return true;
        }
        if depth > 32 {
            return false;
        }
        let d = depth + 1;
        if let TypeExpr::Named(n) = b {
            if self.has_invariant(n) || self.record_fields(n).is_some() {
                return false;
            }
            return self.subtype_depth(a, &self.resolve(b), d);
        }
        if let TypeExpr::Named(n) = a {
            if self.record_fields(n).is_some() {
                return match b {
                    TypeExpr::Union(ts) => ts.iter().any(|t| self.subtype_depth(a, t, d)),
                    TypeExpr::Optional(t) => self.subtype_depth(a, t, d),
                    _ => false,
                };
            }
            return self.subtype_depth(&self.resolve(a), b, d);
        }
        if let TypeExpr::Union(ts) = a {
            return ts.iter().all(|t| self.subtype_depth(t, b, d));
        }
        match (a, b) {
            (_, TypeExpr::Union(ts)) => ts.iter().any(|t| self.subtype_depth(a, t, d)),
            (TypeExpr::Optional(x), TypeExpr::Optional(y)) => self.subtype_depth(x, y, d),
            (_, TypeExpr::Optional(y)) => self.subtype_depth(a, y, d),
            (TypeExpr::Nat1, TypeExpr::Nat | TypeExpr::Int | TypeExpr::Real) => true,
            (TypeExpr::Nat, TypeExpr::Int | TypeExpr::Real) => true,
            (TypeExpr::Int, TypeExpr::Real) => true,
            (TypeExpr::Seq(x), TypeExpr::Seq(y)) | (TypeExpr::Set(x), TypeExpr::Set(y)) => {
                self.subtype_depth(x, y, d)
            }
            (TypeExpr::Map(d1, r1), TypeExpr::Map(d2, r2)) => {
                self.subtype_depth(d1, d2, d) && self.subtype_depth(r1, r2, d)
            }
            (TypeExpr::Product(xs), TypeExpr::Product(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.subtype_depth(x, y, d))
            }
            _ => false,
        }
    }

    /// Smallest common supertype the checker can express.
    pub fn join(&self, a: &TypeExpr, b: &TypeExpr) -> TypeExpr {
        if self.is_subtype(a, b) {
            return b.clone();
        }
        if self.is_subtype(b, a) {
            return a.clone();
        }
        if let (Some(x), Some(y)) = (self.numeric_rank(a), self.numeric_rank(b)) {
            if !matches!(a, TypeExpr::Union(_)) && !matches!(b, TypeExpr::Union(_)) {
                return rank_type(x.max(y));
            }
        }
        match (self.resolve(a), self.resolve(b)) {
            (TypeExpr::Seq(x), TypeExpr::Seq(y)) => return TypeExpr::seq(self.join(&x, &y)),
            (TypeExpr::Set(x), TypeExpr::Set(y)) => return TypeExpr::set(self.join(&x, &y)),
            (TypeExpr::Map(d1, r1), TypeExpr::Map(d2, r2)) => {
                return TypeExpr::map(self.join(&d1, &d2), self.join(&r1, &r2))
            }
            (TypeExpr::Optional(x), TypeExpr::Optional(y)) => {
                return TypeExpr::optional(self.join(&x, &y))
            }
            (TypeExpr::Optional(x), _) => return TypeExpr::optional(self.join(&x, b)),
            (_, TypeExpr::Optional(y)) => return TypeExpr::optional(self.join(a, &y)),
            _ => {}
        }
        let mut members = Vec::new();
        for t in [a, b] {
            match t {
                TypeExpr::Union(ts) => members.extend(ts.iter().cloned()),
                other => members.push(other.clone()),
            }
        }
        let mut out: Vec<TypeExpr> = Vec::new();
        for m in members {
            if !out.contains(&m) {
                out.push(m);
            }
        }
        TypeExpr::Union(out)
    }

    fn expect_numeric(&mut self, e: &Expr) -> TResult<u8> {
        let t = self.infer(e)?;
        match self.numeric_rank(&t) {
            Some(r) => Ok(r),
            None => err(&e.loc, format!("expected a numeric expression, found {t}")),
        }
    }

    fn expect_bool(&mut self, e: &Expr) -> TResult<()> {
        let t = self.infer(e)?;
        if self.compatible(&t, &TypeExpr::Bool) {
            Ok(())
        } else {
            err(&e.loc, format!("expected a bool expression, found {t}"))
        }
    }

    fn expect_set(&mut self, e: &Expr) -> TResult<TypeExpr> {
        let t = self.infer(e)?;
        match self.set_elem(&t) {
            Some(elem) => Ok(elem),
            None => err(&e.loc, format!("expected a set, found {t}")),
        }
    }

    fn expect_seq(&mut self, e: &Expr) -> TResult<TypeExpr> {
        let t = self.infer(e)?;
        match self.seq_elem(&t) {
            Some(elem) => Ok(elem),
            None => err(&e.loc, format!("expected a sequence, found {t}")),
        }
    }

    fn expect_map(&mut self, e: &Expr) -> TResult<(TypeExpr, TypeExpr)> {
        let t = self.infer(e)?;
        match self.map_parts(&t) {
            Some(p) => Ok(p),
            None => err(&e.loc, format!("expected a map, found {t}")),
        }
    }

    fn expect_compatible(&mut self, e: &Expr, expected: &TypeExpr) -> TResult<()> {
        let t = self.infer(e)?;
        if self.compatible(&t, expected) {
            Ok(())
        } else {
            err(&e.loc, format!("expected {expected}, found {t}"))
        }
    }

    /// Static type of `e` in the current scope.
    pub fn infer(&mut self, e: &Expr) -> TResult<TypeExpr> {
        use TypeExpr as T;
        match &e.kind {
            ExprKind::Literal(l) => Ok(literal_type(l)),
            ExprKind::Name(n) => match self.lookup(n) {
                Some(t) => Ok(t),
                None if self.function_signature(n).is_some() => {
                    err(&e.loc, format!("function {n} used as a value"))
                }
                None => err(&e.loc, format!("unknown identifier {n}")),
            },
            ExprKind::Instantiate { name, .. } => {
                err(&e.loc, format!("polymorphic function {name} used as a value"))
            }
            ExprKind::Unary { op, operand } => self.infer_unary(*op, operand),
            ExprKind::Binary { op, left, right } => self.infer_binary(*op, left, right, &e.loc),
            ExprKind::If {
                cond,
                then,
                elifs,
                otherwise,
            } => {
                self.expect_bool(cond)?;
                let mut t = self.infer(then)?;
                for (c, b) in elifs {
                    self.expect_bool(c)?;
                    let bt = self.infer(b)?;
                    t = self.join(&t, &bt);
                }
                let ot = self.infer(otherwise)?;
                Ok(self.join(&t, &ot))
            }
            ExprKind::Cases {
                scrutinee,
                alts,
                others,
            } => {
                let st = self.infer(scrutinee)?;
                let mut result: Option<TypeExpr> = None;
                for alt in alts {
                    for p in &alt.patterns {
                        self.push();
                        let r = self.bind_pattern(p, &st, &scrutinee.loc).and_then(|_| self.infer(&alt.body));
                        self.pop();
                        let t = r?;
                        result = Some(match result {
                            None => t,
                            Some(acc) => self.join(&acc, &t),
                        });
                    }
                }
                if let Some(o) = others {
                    let t = self.infer(o)?;
                    result = Some(match result {
                        None => t,
                        Some(acc) => self.join(&acc, &t),
                    });
                }
                Ok(result.unwrap_or(T::Any))
            }
            ExprKind::Let { defs, body } => {
                self.push();
                let r = (|| {
                    for (p, v) in defs {
                        let t = self.infer(v)?;
                        self.bind_pattern(p, &t, &v.loc)?;
                    }
                    self.infer(body)
                })();
                self.pop();
                r
            }
            ExprKind::LetBe { bind, st, body } => {
                self.push();
                let r = (|| {
                    self.bind_all(std::slice::from_ref(bind), &e.loc)?;
                    if let Some(s) = st {
                        self.expect_bool(s)?;
                    }
                    self.infer(body)
                })();
                self.pop();
                r
            }
            ExprKind::Forall { binds, body } | ExprKind::Exists { binds, body } => {
                self.push();
                let r = self.bind_all(binds, &e.loc).and_then(|_| self.expect_bool(body));
                self.pop();
                r.map(|_| T::Bool)
            }
            ExprKind::Apply { callee, args } => self.infer_apply(callee, args, &e.loc),
            ExprKind::SetEnum(es) => {
                let mut elem = T::Any;
                for x in es {
                    let t = self.infer(x)?;
                    elem = self.join(&elem, &t);
                }
                Ok(T::set(elem))
            }
            ExprKind::SetRange(a, b) => {
                let ra = self.expect_numeric(a)?;
                let rb = self.expect_numeric(b)?;
                let r = ra.max(rb);
                Ok(T::set(if r <= 1 { rank_type(r) } else { T::Int }))
            }
            ExprKind::SetComp { elem, binds, pred } => {
                self.push();
                let r = (|| {
                    self.bind_all(binds, &e.loc)?;
                    if let Some(p) = pred {
                        self.expect_bool(p)?;
                    }
                    self.infer(elem)
                })();
                self.pop();
                Ok(T::set(r?))
            }
            ExprKind::SeqEnum(es) => {
                let mut elem = T::Any;
                for x in es {
                    let t = self.infer(x)?;
                    elem = self.join(&elem, &t);
                }
                Ok(T::seq(elem))
            }
            ExprKind::SeqComp { elem, bind, pred } => {
                self.push();
                let r = (|| {
                    let bt = self.bind_elem_type(bind, &e.loc)?;
                    if self.numeric_rank(&bt).is_none() {
                        return err(&e.loc, "sequence comprehension binds must range over numbers");
                    }
                    self.bind_pattern(bind.pattern(), &bt, &e.loc)?;
                    if let Some(p) = pred {
                        self.expect_bool(p)?;
                    }
                    self.infer(elem)
                })();
                self.pop();
                Ok(T::seq(r?))
            }
            ExprKind::MapEnum(pairs) => {
                let (mut d, mut r) = (T::Any, T::Any);
                for (k, v) in pairs {
                    let kt = self.infer(k)?;
                    let vt = self.infer(v)?;
                    d = self.join(&d, &kt);
                    r = self.join(&r, &vt);
                }
                Ok(T::map(d, r))
            }
            ExprKind::Tuple(es) => {
                let ts: TResult<Vec<_>> = es.iter().map(|x| self.infer(x)).collect();
                Ok(T::Product(ts?))
            }
            ExprKind::Record { name, fields } => {
                let Some(decl) = self.record_fields(name) else {
                    return err(&e.loc, format!("unknown record type {name}"));
                };
                if decl.len() != fields.len() {
                    return err(
                        &e.loc,
                        format!("mk_{name} expects {} fields, found {}", decl.len(), fields.len()),
                    );
                }
                for (x, (_, t)) in fields.iter().zip(decl.iter()) {
                    self.expect_compatible(x, t)?;
                }
                Ok(T::Named(name.clone()))
            }
            ExprKind::Field { record, field } => {
                let rt = self.infer(record)?;
                self.field_type(&rt, field)
                    .map_or_else(|| err(&e.loc, format!("type {rt} has no field {field}")), Ok)
            }
            ExprKind::TupleSelect { tuple, index } => {
                let tt = self.infer(tuple)?;
                match self.resolve(&tt) {
                    T::Product(ts) if *index <= ts.len() => Ok(ts[index - 1].clone()),
                    T::Any => Ok(T::Any),
                    other => err(&e.loc, format!("cannot select .#{index} from {other}")),
                }
            }
            ExprKind::IsType { expr, .. } => {
                self.infer(expr)?;
                Ok(T::Bool)
            }
        }
    }

    fn field_type(&self, t: &TypeExpr, field: &str) -> Option<TypeExpr> {
        match self.resolve(t) {
            TypeExpr::Named(n) => self
                .record_fields(&n)?
                .iter()
                .find(|(f, _)| f == field)
                .map(|(_, t)| t.clone()),
            TypeExpr::Any => Some(TypeExpr::Any),
            TypeExpr::Union(ts) => self.join_all(ts.iter().map(|t| self.field_type(t, field))),
            _ => None,
        }
    }

    fn infer_unary(&mut self, op: UnaryOp, operand: &Expr) -> TResult<TypeExpr> {
        use TypeExpr as T;
        match op {
            UnaryOp::Not => self.expect_bool(operand).map(|_| T::Bool),
            UnaryOp::Neg => Ok(if self.expect_numeric(operand)? <= 2 { T::Int } else { T::Real }),
            UnaryOp::Abs => Ok(if self.expect_numeric(operand)? <= 2 { T::Nat } else { T::Real }),
            UnaryOp::Floor => self.expect_numeric(operand).map(|_| T::Int),
            UnaryOp::Hd => self.expect_seq(operand),
            UnaryOp::Tl => self.expect_seq(operand).map(T::seq),
            UnaryOp::Len => self.expect_seq(operand).map(|_| T::Nat),
            UnaryOp::Elems => self.expect_seq(operand).map(T::set),
            UnaryOp::Inds => self.expect_seq(operand).map(|_| T::set(T::Nat1)),
            UnaryOp::Card => self.expect_set(operand).map(|_| T::Nat),
            UnaryOp::Dom => self.expect_map(operand).map(|(d, _)| T::set(d)),
            UnaryOp::Rng => self.expect_map(operand).map(|(_, r)| T::set(r)),
            UnaryOp::Power => self.expect_set(operand).map(|e| T::set(T::set(e))),
            UnaryOp::Dunion | UnaryOp::Dinter => {
                let elem = self.expect_set(operand)?;
                match self.set_elem(&elem) {
                    Some(inner) => Ok(T::set(inner)),
                    None => err(&operand.loc, format!("expected a set of sets, found set of {elem}")),
                }
            }
        }
    }

    fn infer_binary(&mut self, op: BinaryOp, left: &Expr, right: &Expr, loc: &Location) -> TResult<TypeExpr> {
        use BinaryOp as B;
        use TypeExpr as T;
        match op {
            B::Add | B::Mul | B::Sub | B::Div | B::IntDiv | B::Mod | B::Rem => {
                let l = self.expect_numeric(left)?;
                let r = self.expect_numeric(right)?;
                let both_nat = l <= 1 && r <= 1;
                let integral = l <= 2 && r <= 2;
                Ok(match op {
                    B::Add if both_nat => rank_type(l.min(r)),
                    B::Mul if both_nat => rank_type(l.max(r)),
                    B::Add | B::Mul | B::Sub => {
                        if integral {
                            T::Int
                        } else {
                            T::Real
                        }
                    }
                    B::Div => T::Real,
                    _ if !integral => {
                        return err(loc, format!("{} needs integer operands", op.symbol()));
                    }
                    _ if both_nat => T::Nat,
                    _ => T::Int,
                })
            }
            B::Lt | B::Le | B::Gt | B::Ge => {
                self.expect_numeric(left)?;
                self.expect_numeric(right)?;
                Ok(T::Bool)
            }
            B::Eq | B::Ne => {
                let l = self.infer(left)?;
                let r = self.infer(right)?;
                if self.compatible(&l, &r) {
                    Ok(T::Bool)
                } else {
                    err(loc, format!("cannot compare {l} with {r}"))
                }
            }
            B::And | B::Or | B::Implies | B::Iff => {
                self.expect_bool(left)?;
                self.expect_bool(right)?;
                Ok(T::Bool)
            }
            B::InSet | B::NotInSet => {
                let l = self.infer(left)?;
                let elem = self.expect_set(right)?;
                if self.compatible(&l, &elem) {
                    Ok(T::Bool)
                } else {
                    err(loc, format!("{l} cannot be a member of set of {elem}"))
                }
            }
            B::Subset | B::PSubset => {
                self.expect_set(left)?;
                self.expect_set(right)?;
                Ok(T::Bool)
            }
            B::Union | B::Inter | B::Diff => {
                let l = self.expect_set(left)?;
                let r = self.expect_set(right)?;
                Ok(T::set(self.join(&l, &r)))
            }
            B::Concat => {
                let l = self.expect_seq(left)?;
                let r = self.expect_seq(right)?;
                Ok(T::seq(self.join(&l, &r)))
            }
            B::Override | B::Munion => {
                let (d1, r1) = self.expect_map(left)?;
                let (d2, r2) = self.expect_map(right)?;
                Ok(T::map(self.join(&d1, &d2), self.join(&r1, &r2)))
            }
        }
    }

    /// Parameter types and result type of a callable name: a function, or a
    /// derived `pre_`, `post_` or `inv_` function.
    pub fn function_signature(&self, name: &str) -> Option<(Vec<String>, Vec<TypeExpr>, TypeExpr)> {
        if let Some(f) = self.module.function(name) {
            return Some((f.type_params.clone(), f.param_types.clone(), f.return_type.clone()));
        }
        if let Some(base) = name.strip_prefix("pre_") {
            let f = self.module.function(base).filter(|f| f.pre.is_some())?;
            return Some((f.type_params.clone(), f.param_types.clone(), TypeExpr::Bool));
        }
        if let Some(base) = name.strip_prefix("post_") {
            let f = self.module.function(base).filter(|f| f.post.is_some())?;
            let mut ps = f.param_types.clone();
            ps.push(f.return_type.clone());
            return Some((f.type_params.clone(), ps, TypeExpr::Bool));
        }
        if let Some(base) = name.strip_prefix("inv_") {
            let t = self.module.type_def(base).filter(|t| t.invariant.is_some())?;
            return Some((Vec::new(), vec![t.underlying()], TypeExpr::Bool));
        }
        None
    }

    fn infer_apply(&mut self, callee: &Expr, args: &[Expr], loc: &Location) -> TResult<TypeExpr> {
        let (name, type_args) = match &callee.kind {
            ExprKind::Name(n) if !self.is_local(n) && self.lookup(n).is_none() => (Some(n), None),
            ExprKind::Instantiate { name, type_args } => (Some(name), Some(type_args)),
            _ => (None, None),
        };
        if let Some(name) = name {
            let Some((tparams, ptypes, ret)) = self.function_signature(name) else {
                return err(&callee.loc, format!("unknown function {name}"));
            };
            if ptypes.len() != args.len() {
                return err(
                    loc,
                    format!("{name} expects {} arguments, found {}", ptypes.len(), args.len()),
                );
            }
            let subst: Vec<(String, TypeExpr)> = match type_args {
                Some(ta) => {
                    if ta.len() != tparams.len() {
                        return err(
                            &callee.loc,
                            format!("{name} expects {} type arguments, found {}", tparams.len(), ta.len()),
                        );
                    }
                    tparams.iter().cloned().zip(ta.iter().cloned()).collect()
                }
                None => tparams.iter().map(|p| (p.clone(), TypeExpr::Any)).collect(),
            };
            let lookup = |p: &str| subst.iter().find(|(n, _)| n == p).map(|(_, t)| t.clone());
            for (a, t) in args.iter().zip(ptypes.iter()) {
                let expected = t.substitute(&lookup);
                self.expect_compatible(a, &expected)?;
            }
            return Ok(ret.substitute(&lookup));
        }
        let ct = self.infer(callee)?;
        if args.len() != 1 {
            return err(loc, format!("cannot apply {ct} to {} arguments", args.len()));
        }
        let resolved = self.resolve(&ct);
        if let Some(elem) = self.seq_elem(&resolved).filter(|_| !matches!(resolved, TypeExpr::Any)) {
            self.expect_numeric(&args[0])?;
            return Ok(elem);
        }
        if let Some((d, r)) = self.map_parts(&resolved) {
            self.expect_compatible(&args[0], &d)?;
            return Ok(r);
        }
        err(loc, format!("cannot apply a value of type {ct}"))
    }

    /// Classifies an application as a sequence or map index, if it is one.
    pub fn apply_kind(&mut self, callee: &Expr) -> Option<ApplyKind> {
        match &callee.kind {
            ExprKind::Name(n) if self.lookup(n).is_none() => return None,
            ExprKind::Instantiate { .. } => return None,
            _ => {}
        }
        let t = self.infer(callee).ok()?;
        match self.resolve(&t) {
            TypeExpr::Seq(_) => Some(ApplyKind::Seq),
            TypeExpr::Map(..) => Some(ApplyKind::Map),
            TypeExpr::Union(_) if self.seq_elem(&t).is_some() => Some(ApplyKind::Seq),
            TypeExpr::Union(_) if self.map_parts(&t).is_some() => Some(ApplyKind::Map),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApplyKind {
    Seq,
    Map,
}

fn rank_type(r: u8) -> TypeExpr {
    match r {
        0 => TypeExpr::Nat1,
        1 => TypeExpr::Nat,
        2 => TypeExpr::Int,
        _ => TypeExpr::Real,
    }
}

pub fn literal_type(l: &Literal) -> TypeExpr {
    match l {
        Literal::Bool(_) => TypeExpr::Bool,
        Literal::Int(i) if i.is_positive() => TypeExpr::Nat1,
        Literal::Int(i) if i.is_negative() => TypeExpr::Int,
        Literal::Int(_) => TypeExpr::Nat,
        Literal::Real(_) => TypeExpr::Real,
        Literal::Char(_) => TypeExpr::Char,
        Literal::Quote(q) => TypeExpr::Quote(q.clone()),
        Literal::Str(_) => TypeExpr::seq(TypeExpr::Char),
        Literal::Nil => TypeExpr::optional(TypeExpr::Any),
    }
}
