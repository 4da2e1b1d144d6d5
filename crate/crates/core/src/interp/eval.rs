//! The expression evaluator.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::context::{Context, ENUMERATION_LIMIT, PRODUCT_CAP};
use super::error::{codes, EvalError, EvalResult};
use super::pattern::{literal_value, match_pattern};
use crate::lang::{BinaryOp, Bind, Expr, ExprKind, Location, TypeExpr, UnaryOp};
use crate::values::{enumerate_all, type_membership, Value};

/// Largest set whose power set may be taken.
const POWER_SET_LIMIT: usize = 16;
/// Largest set a range expression may build.
const RANGE_LIMIT: u64 = 1_000_000;

/// Values for one bind and whether they are every value it ranges over.
pub(crate) struct BindValues {
    pub values: Vec<Value>,
    pub exhaustive: bool,
}

fn mismatch(expected: &str, v: &Value, loc: &Location) -> EvalError {
    EvalError::runtime(
        codes::TYPE_MISMATCH,
        format!("Expected {expected} but found {v}"),
        loc,
    )
}

impl<'m> Context<'m> {
    /// Evaluates `e` in this context.
    pub fn evaluate(&mut self, e: &Expr) -> EvalResult<Value> {
        self.tick()?;
        match &e.kind {
            ExprKind::Literal(l) => Ok(literal_value(l)),
            ExprKind::Name(n) => self.eval_name(n, &e.loc),
            ExprKind::Instantiate { name, .. } => Err(EvalError::runtime(
                codes::TYPE_MISMATCH,
                format!("Polymorphic function {name} used as a value"),
                &e.loc,
            )),
            ExprKind::Unary { op, operand } => {
                let v = self.evaluate(operand)?;
                self.unary(*op, v, &e.loc)
            }
            ExprKind::Binary { op, left, right } => self.binary(*op, left, right, &e.loc),
            ExprKind::If {
                cond,
                then,
                elifs,
                otherwise,
            } => {
                if self.eval_bool(cond)? {
                    return self.evaluate(then);
                }
                for (c, b) in elifs {
                    if self.eval_bool(c)? {
                        return self.evaluate(b);
                    }
                }
                self.evaluate(otherwise)
            }
            ExprKind::Cases {
                scrutinee,
                alts,
                others,
            } => {
                let v = self.evaluate(scrutinee)?;
                for alt in alts {
                    for p in &alt.patterns {
                        if let Some(bindings) = match_pattern(p, &v) {
                            let mark = self.mark();
                            self.bind_all(bindings);
                            let r = self.evaluate(&alt.body);
                            self.restore(mark);
                            return r;
                        }
                    }
                }
                match others {
                    Some(o) => self.evaluate(o),
                    None => Err(EvalError::runtime(
                        codes::CASES_NO_MATCH,
                        format!("Cases exhausted: no pattern matches {v}"),
                        &e.loc,
                    )),
                }
            }
            ExprKind::Let { defs, body } => {
                let mark = self.mark();
                let r = self.eval_let(defs, body);
                self.restore(mark);
                r
            }
            ExprKind::LetBe { bind, st, body } => self.eval_let_be(bind, st.as_deref(), body, &e.loc),
            ExprKind::Forall { binds, body } => self.eval_quantifier(binds, body, true, &e.loc),
            ExprKind::Exists { binds, body } => self.eval_quantifier(binds, body, false, &e.loc),
            ExprKind::Apply { callee, args } => self.eval_apply(callee, args, &e.loc),
            ExprKind::SetEnum(es) => {
                let mut out = BTreeSet::new();
                for x in es {
                    out.insert(self.evaluate(x)?);
                }
                Ok(Value::Set(out))
            }
            ExprKind::SetRange(a, b) => {
                let lo = self.evaluate(a)?;
                let hi = self.evaluate(b)?;
                self.set_range(&lo, &hi, &e.loc)
            }
            ExprKind::SetComp { elem, binds, pred } => {
                let lists = self.bind_lists(binds, &e.loc)?;
                let exhaustive = lists.iter().all(|l| l.exhaustive);
                let mut out = BTreeSet::new();
                let (_, complete) = self.for_each_binding::<()>(binds, &lists, &mut |ctx, _| {
                    let keep = match pred {
                        Some(p) => ctx.eval_bool(p)?,
                        None => true,
                    };
                    if keep {
                        out.insert(ctx.evaluate(elem)?);
                    }
                    Ok(None)
                })?;
                if !(exhaustive && complete) {
                    self.tainted = true;
                }
                Ok(Value::Set(out))
            }
            ExprKind::SeqEnum(es) => {
                let mut out = Vec::with_capacity(es.len());
                for x in es {
                    out.push(self.evaluate(x)?);
                }
                Ok(Value::Seq(out))
            }
            ExprKind::SeqComp { elem, bind, pred } => {
                let binds = std::slice::from_ref(&**bind);
                let lists = self.bind_lists(binds, &e.loc)?;
                let exhaustive = lists.iter().all(|l| l.exhaustive);
                let mut out = Vec::new();
                let (_, complete) = self.for_each_binding::<()>(binds, &lists, &mut |ctx, _| {
                    let keep = match pred {
                        Some(p) => ctx.eval_bool(p)?,
                        None => true,
                    };
                    if keep {
                        out.push(ctx.evaluate(elem)?);
                    }
                    Ok(None)
                })?;
                if !(exhaustive && complete) {
                    self.tainted = true;
                }
                Ok(Value::Seq(out))
            }
            ExprKind::MapEnum(pairs) => {
                let mut out = BTreeMap::new();
                for (k, v) in pairs {
                    let k = self.evaluate(k)?;
                    let v = self.evaluate(v)?;
                    if let Some(prev) = out.get(&k) {
                        if prev != &v {
                            return Err(EvalError::runtime(
                                codes::MUNION_CLASH,
                                format!("Duplicate map key {k} has different values"),
                                &e.loc,
                            ));
                        }
                    }
                    out.insert(k, v);
                }
                Ok(Value::Map(out))
            }
            ExprKind::Tuple(es) => {
                let mut out = Vec::with_capacity(es.len());
                for x in es {
                    out.push(self.evaluate(x)?);
                }
                Ok(Value::Tuple(out))
            }
            ExprKind::Record { name, fields } => {
                let mut vals = Vec::with_capacity(fields.len());
                for x in fields {
                    vals.push(self.evaluate(x)?);
                }
                let rec = Value::Record(name.clone(), vals);
                let m = self.module;
                if !type_membership(&rec, &TypeExpr::Named(name.clone()), m, self) {
                    return Err(EvalError::runtime(
                        codes::NOT_IN_TYPE,
                        format!("Value {rec} is not a {name}"),
                        &e.loc,
                    ));
                }
                Ok(rec)
            }
            ExprKind::Field { record, field } => {
                let v = self.evaluate(record)?;
                self.field(v, field, &e.loc)
            }
            ExprKind::TupleSelect { tuple, index } => match self.evaluate(tuple)? {
                Value::Tuple(mut vs) if *index >= 1 && *index <= vs.len() => Ok(vs.swap_remove(index - 1)),
                other => Err(mismatch(&format!("a tuple with a field {index}"), &other, &e.loc)),
            },
            ExprKind::IsType { expr, ty } => {
                let v = self.evaluate(expr)?;
                let t = self.concrete(ty);
                let m = self.module;
                Ok(Value::Bool(type_membership(&v, &t, m, self)))
            }
        }
    }

    /// Evaluates `e` and requires a boolean.
    pub fn eval_bool(&mut self, e: &Expr) -> EvalResult<bool> {
        match self.evaluate(e)? {
            Value::Bool(b) => Ok(b),
            other => Err(mismatch("a bool", &other, &e.loc)),
        }
    }

    fn eval_name(&mut self, n: &str, loc: &Location) -> EvalResult<Value> {
        if let Some(v) = self.lookup(n) {
            return Ok(v.clone());
        }
        if self.module.state_field(n).is_some() {
            return Err(EvalError::runtime(
                codes::STATE_UNAVAILABLE,
                format!("State field {n} is not available"),
                loc,
            ));
        }
        Err(EvalError::runtime(
            codes::TYPE_MISMATCH,
            format!("Name {n} has no value"),
            loc,
        ))
    }

    fn eval_let(&mut self, defs: &[(crate::lang::Pattern, Expr)], body: &Expr) -> EvalResult<Value> {
        for (p, x) in defs {
            let v = self.evaluate(x)?;
            match match_pattern(p, &v) {
                Some(bindings) => self.bind_all(bindings),
                None => {
                    return Err(EvalError::runtime(
                        codes::PATTERN_MISMATCH,
                        format!("Value {v} does not match pattern {p}"),
                        &x.loc,
                    ))
                }
            }
        }
        self.evaluate(body)
    }

    fn eval_let_be(&mut self, bind: &Bind, st: Option<&Expr>, body: &Expr, loc: &Location) -> EvalResult<Value> {
        let binds = std::slice::from_ref(bind);
        let lists = self.bind_lists(binds, loc)?;
        let exhaustive = lists.iter().all(|l| l.exhaustive);
        let (chosen, complete) = self.for_each_binding(binds, &lists, &mut |ctx, mark| {
            let ok = match st {
                Some(p) => ctx.eval_bool(p)?,
                None => true,
            };
            Ok(ok.then(|| ctx.bound_since(mark)))
        })?;
        match chosen {
            Some(bindings) => {
                let mark = self.mark();
                self.bind_all(bindings);
                let r = self.evaluate(body);
                self.restore(mark);
                r
            }
            None if exhaustive && complete => Err(EvalError::runtime(
                codes::LET_BE_NO_MATCH,
                format!("Let be st found no applicable bindings for {}", bind.pattern()),
                loc,
            )),
            None => Err(EvalError::runtime(
                codes::INFINITE_BIND,
                format!("Let be st found no applicable bindings among the values tried for {}", bind.pattern()),
                loc,
            )),
        }
    }

    fn eval_quantifier(&mut self, binds: &[Bind], body: &Expr, universal: bool, loc: &Location) -> EvalResult<Value> {
        let lists = self.bind_lists(binds, loc)?;
        let exhaustive = lists.iter().all(|l| l.exhaustive);
        let (decided, complete) = self.for_each_binding(binds, &lists, &mut |ctx, _| {
            let b = ctx.eval_bool(body)?;
            Ok((b != universal).then_some(()))
        })?;
        if decided.is_some() {
            return Ok(Value::Bool(!universal));
        }
        if !(exhaustive && complete) {
            self.tainted = true;
        }
        Ok(Value::Bool(universal))
    }

    /// Values for each bind. Type binds use an override when one is present
    /// and this is the obligation level, otherwise the type's full
    /// enumeration when it is small enough.
    pub(crate) fn bind_lists(&mut self, binds: &[Bind], loc: &Location) -> EvalResult<Vec<BindValues>> {
        let mut out = Vec::with_capacity(binds.len());
        for b in binds {
            out.push(match b {
                Bind::Set { set, .. } => match self.evaluate(set)? {
                    Value::Set(s) => BindValues {
                        values: s.into_iter().collect(),
                        exhaustive: true,
                    },
                    other => return Err(mismatch("a set", &other, &set.loc)),
                },
                Bind::Type { pattern, ty } => {
                    let t = self.concrete(ty);
                    let key = pattern.to_string();
                    let over = if self.call_depth == 0 {
                        self.overrides.get(&key, &t).cloned()
                    } else {
                        None
                    };
                    match over {
                        Some(o) => BindValues {
                            values: o.values,
                            exhaustive: o.all_values,
                        },
                        None => {
                            let m = self.module;
                            let (values, enumerated) = enumerate_all(&t, ENUMERATION_LIMIT, m, self);
                            if !enumerated {
                                return Err(EvalError::runtime(
                                    codes::INFINITE_BIND,
                                    format!("Cannot enumerate all values of {t} for {key}"),
                                    loc,
                                ));
                            }
                            BindValues {
                                values,
                                exhaustive: true,
                            }
                        }
                    }
                }
            });
        }
        Ok(out)
    }

    /// Runs `f` under every combination of bind values, leftmost bind
    /// varying slowest, until it returns `Some`. Combinations whose values
    /// do not match the bind patterns are skipped. Returns the first `Some`
    /// and whether the product was fully visited within the cap.
    pub(crate) fn for_each_binding<R>(
        &mut self,
        binds: &[Bind],
        lists: &[BindValues],
        f: &mut dyn FnMut(&mut Self, usize) -> EvalResult<Option<R>>,
    ) -> EvalResult<(Option<R>, bool)> {
        if lists.iter().any(|l| l.values.is_empty()) {
            return Ok((None, true));
        }
        let mut idx = vec![0usize; lists.len()];
        let mut visited: u64 = 0;
        loop {
            if visited >= PRODUCT_CAP {
                return Ok((None, false));
            }
            visited += 1;
            let mark = self.mark();
            let mut matched = true;
            for (i, b) in binds.iter().enumerate() {
                match match_pattern(b.pattern(), &lists[i].values[idx[i]]) {
                    Some(bs) => self.bind_all(bs),
                    None => {
                        matched = false;
                        break;
                    }
                }
            }
            let r = if matched { f(self, mark) } else { Ok(None) };
            self.restore(mark);
            if let Some(found) = r? {
                return Ok((Some(found), true));
            }
            let mut pos = lists.len();
            loop {
                if pos == 0 {
                    return Ok((None, true));
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < lists[pos].values.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    pub(crate) fn bound_since(&self, mark: usize) -> Vec<(String, Value)> {
        self.env_slice(mark).to_vec()
    }

    fn eval_apply(&mut self, callee: &Expr, args: &[Expr], loc: &Location) -> EvalResult<Value> {
        match &callee.kind {
            ExprKind::Name(n) if self.lookup(n).is_none() => {
                let argv = self.eval_args(args)?;
                self.call_named(n, None, argv, loc)
            }
            ExprKind::Instantiate { name, type_args } => {
                let ta = type_args.iter().map(|t| self.concrete(t)).collect();
                let argv = self.eval_args(args)?;
                self.call_named(name, Some(ta), argv, loc)
            }
            _ => {
                let f = self.evaluate(callee)?;
                if args.len() != 1 {
                    return Err(mismatch("a function", &f, loc));
                }
                let a = self.evaluate(&args[0])?;
                match f {
                    Value::Seq(mut s) => {
                        let i = match &a {
                            Value::Int(i) if i >= &BigInt::one() => i,
                            _ => {
                                return Err(EvalError::runtime(
                                    codes::SEQ_INDEX_NOT_NAT1,
                                    format!("Value {a} is not a nat1"),
                                    loc,
                                ))
                            }
                        };
                        match i.to_usize().filter(|i| *i <= s.len()) {
                            Some(i) => Ok(s.swap_remove(i - 1)),
                            None => Err(EvalError::runtime(
                                codes::SEQ_INDEX_RANGE,
                                format!("Sequence index {i} out of range"),
                                loc,
                            )),
                        }
                    }
                    Value::Map(mut m) => m.remove(&a).ok_or_else(|| {
                        EvalError::runtime(codes::MAP_KEY, format!("Key {a} is not in the map domain"), loc)
                    }),
                    other => Err(mismatch("a sequence or map", &other, &callee.loc)),
                }
            }
        }
    }

    fn eval_args(&mut self, args: &[Expr]) -> EvalResult<Vec<Value>> {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            out.push(self.evaluate(a)?);
        }
        Ok(out)
    }

    fn field(&mut self, v: Value, field: &str, loc: &Location) -> EvalResult<Value> {
        let Value::Record(name, mut vals) = v else {
            return Err(mismatch("a record", &v, loc));
        };
        let m = self.module;
        let fields = match m.type_def(&name).map(|d| &d.body) {
            Some(crate::lang::TypeBody::Record(fs)) => Some(fs.as_slice()),
            _ => m.state.as_ref().filter(|s| s.name == name).map(|s| s.fields.as_slice()),
        };
        match fields.and_then(|fs| fs.iter().position(|(f, _)| f == field)) {
            Some(i) if i < vals.len() => Ok(vals.swap_remove(i)),
            _ => Err(EvalError::runtime(
                codes::TYPE_MISMATCH,
                format!("Record {name} has no field {field}"),
                loc,
            )),
        }
    }

    fn set_range(&mut self, lo: &Value, hi: &Value, loc: &Location) -> EvalResult<Value> {
        let lo = lo.as_rational().ok_or_else(|| mismatch("a number", lo, loc))?.ceil().to_integer();
        let hi = hi.as_rational().ok_or_else(|| mismatch("a number", hi, loc))?.floor().to_integer();
        if hi < lo {
            return Ok(Value::Set(BTreeSet::new()));
        }
        let size = (&hi - &lo).to_u64().unwrap_or(u64::MAX);
        if size >= RANGE_LIMIT {
            return Err(EvalError::runtime(
                codes::TOO_LARGE,
                format!("Set range {{{lo}, ..., {hi}}} is too large"),
                loc,
            ));
        }
        let mut out = BTreeSet::new();
        let mut i = lo;
        while i <= hi {
            out.insert(Value::Int(i.clone()));
            i += 1;
        }
        Ok(Value::Set(out))
    }

    fn unary(&mut self, op: UnaryOp, v: Value, loc: &Location) -> EvalResult<Value> {
        match (op, v) {
            (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
            (UnaryOp::Neg, Value::Int(i)) => Ok(Value::Int(-i)),
            (UnaryOp::Neg, Value::Real(r)) => Ok(Value::Real(-r)),
            (UnaryOp::Abs, Value::Int(i)) => Ok(Value::Int(i.abs())),
            (UnaryOp::Abs, Value::Real(r)) => Ok(Value::Real(r.abs())),
            (UnaryOp::Floor, Value::Int(i)) => Ok(Value::Int(i)),
            (UnaryOp::Floor, Value::Real(r)) => Ok(Value::Int(r.floor().to_integer())),
            (UnaryOp::Hd, Value::Seq(mut s)) => {
                if s.is_empty() {
                    Err(EvalError::runtime(codes::HEAD_OF_EMPTY, "Cannot take hd of empty sequence", loc))
                } else {
                    Ok(s.swap_remove(0))
                }
            }
            (UnaryOp::Tl, Value::Seq(mut s)) => {
                if s.is_empty() {
                    Err(EvalError::runtime(codes::TAIL_OF_EMPTY, "Cannot take tl of empty sequence", loc))
                } else {
                    s.remove(0);
                    Ok(Value::Seq(s))
                }
            }
            (UnaryOp::Len, Value::Seq(s)) => Ok(Value::int(s.len())),
            (UnaryOp::Elems, Value::Seq(s)) => Ok(Value::Set(s.into_iter().collect())),
            (UnaryOp::Inds, Value::Seq(s)) => Ok(Value::Set((1..=s.len()).map(Value::int).collect())),
            (UnaryOp::Card, Value::Set(s)) => Ok(Value::int(s.len())),
            (UnaryOp::Dom, Value::Map(m)) => Ok(Value::Set(m.into_keys().collect())),
            (UnaryOp::Rng, Value::Map(m)) => Ok(Value::Set(m.into_values().collect())),
            (UnaryOp::Power, Value::Set(s)) => {
                if s.len() > POWER_SET_LIMIT {
                    return Err(EvalError::runtime(
                        codes::TOO_LARGE,
                        format!("Power set of a set with {} elements is too large", s.len()),
                        loc,
                    ));
                }
                let items: Vec<Value> = s.into_iter().collect();
                let mut out = BTreeSet::new();
                for mask in 0u32..(1u32 << items.len()) {
                    out.insert(Value::Set(
                        items
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask & (1 << i) != 0)
                            .map(|(_, v)| v.clone())
                            .collect(),
                    ));
                }
                Ok(Value::Set(out))
            }
            (UnaryOp::Dunion, Value::Set(s)) => {
                let mut out = BTreeSet::new();
                for x in s {
                    match x {
                        Value::Set(inner) => out.extend(inner),
                        other => return Err(mismatch("a set", &other, loc)),
                    }
                }
                Ok(Value::Set(out))
            }
            (UnaryOp::Dinter, Value::Set(s)) => {
                let mut acc: Option<BTreeSet<Value>> = None;
                for x in s {
                    match x {
                        Value::Set(inner) => {
                            acc = Some(match acc {
                                None => inner,
                                Some(a) => a.intersection(&inner).cloned().collect(),
                            })
                        }
                        other => return Err(mismatch("a set", &other, loc)),
                    }
                }
                acc.map(Value::Set).ok_or_else(|| {
                    EvalError::runtime(codes::DINTER_OF_EMPTY, "Cannot take dinter of empty set", loc)
                })
            }
            (op, v) => {
                let expected = match op {
                    UnaryOp::Not => "a bool",
                    UnaryOp::Neg | UnaryOp::Abs | UnaryOp::Floor => "a number",
                    UnaryOp::Hd | UnaryOp::Tl | UnaryOp::Len | UnaryOp::Elems | UnaryOp::Inds => "a sequence",
                    UnaryOp::Dom | UnaryOp::Rng => "a map",
                    _ => "a set",
                };
                Err(mismatch(expected, &v, loc))
            }
        }
    }

    fn binary(&mut self, op: BinaryOp, left: &Expr, right: &Expr, loc: &Location) -> EvalResult<Value> {
        match op {
            BinaryOp::And => Ok(Value::Bool(self.eval_bool(left)? && self.eval_bool(right)?)),
            BinaryOp::Or => Ok(Value::Bool(self.eval_bool(left)? || self.eval_bool(right)?)),
            BinaryOp::Implies => Ok(Value::Bool(!self.eval_bool(left)? || self.eval_bool(right)?)),
            BinaryOp::Iff => {
                let l = self.eval_bool(left)?;
                Ok(Value::Bool(l == self.eval_bool(right)?))
            }
            _ => {
                let l = self.evaluate(left)?;
                let r = self.evaluate(right)?;
                apply_binary(op, l, r, loc)
            }
        }
    }
}

fn rational(v: &Value, loc: &Location) -> EvalResult<BigRational> {
    v.as_rational().ok_or_else(|| mismatch("a number", v, loc))
}

fn integer(v: Value, op: BinaryOp, loc: &Location) -> EvalResult<BigInt> {
    match v {
        Value::Int(i) => Ok(i),
        other => Err(mismatch(&format!("an integer operand for {}", op.symbol()), &other, loc)),
    }
}

fn into_set(v: Value, loc: &Location) -> EvalResult<BTreeSet<Value>> {
    match v {
        Value::Set(s) => Ok(s),
        other => Err(mismatch("a set", &other, loc)),
    }
}

fn into_map(v: Value, loc: &Location) -> EvalResult<BTreeMap<Value, Value>> {
    match v {
        Value::Map(m) => Ok(m),
        other => Err(mismatch("a map", &other, loc)),
    }
}

/// Applies a strict binary operator to evaluated operands.
pub(crate) fn apply_binary(op: BinaryOp, l: Value, r: Value, loc: &Location) -> EvalResult<Value> {
    use BinaryOp as B;
    match op {
        B::Add | B::Sub | B::Mul => {
            if let (Value::Int(a), Value::Int(b)) = (&l, &r) {
                return Ok(Value::Int(match op {
                    B::Add => a + b,
                    B::Sub => a - b,
                    _ => a * b,
                }));
            }
            let (a, b) = (rational(&l, loc)?, rational(&r, loc)?);
            Ok(Value::number(match op {
                B::Add => a + b,
                B::Sub => a - b,
                _ => a * b,
            }))
        }
        B::Div => {
            let (a, b) = (rational(&l, loc)?, rational(&r, loc)?);
            if b.is_zero() {
                return Err(EvalError::runtime(codes::DIVISION_BY_ZERO, "Division by zero", loc));
            }
            Ok(Value::number(a / b))
        }
        B::IntDiv | B::Mod | B::Rem => {
            let a = integer(l, op, loc)?;
            let b = integer(r, op, loc)?;
            if b.is_zero() {
                return Err(EvalError::runtime(codes::DIVISION_BY_ZERO, "Division by zero", loc));
            }
            Ok(Value::Int(match op {
                B::IntDiv => &a / &b,
                B::Rem => &a % &b,
                _ => a.mod_floor(&b),
            }))
        }
        B::Lt | B::Le | B::Gt | B::Ge => {
            let ord = match (&l, &r) {
                (Value::Int(a), Value::Int(b)) => a.cmp(b),
                _ => rational(&l, loc)?.cmp(&rational(&r, loc)?),
            };
            Ok(Value::Bool(match op {
                B::Lt => ord.is_lt(),
                B::Le => ord.is_le(),
                B::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            }))
        }
        B::Eq => Ok(Value::Bool(l == r)),
        B::Ne => Ok(Value::Bool(l != r)),
        B::InSet => Ok(Value::Bool(into_set(r, loc)?.contains(&l))),
        B::NotInSet => Ok(Value::Bool(!into_set(r, loc)?.contains(&l))),
        B::Union => {
            let mut a = into_set(l, loc)?;
            a.extend(into_set(r, loc)?);
            Ok(Value::Set(a))
        }
        B::Inter => {
            let a = into_set(l, loc)?;
            let b = into_set(r, loc)?;
            Ok(Value::Set(a.intersection(&b).cloned().collect()))
        }
        B::Diff => {
            let a = into_set(l, loc)?;
            let b = into_set(r, loc)?;
            Ok(Value::Set(a.difference(&b).cloned().collect()))
        }
        B::Subset => {
            let a = into_set(l, loc)?;
            let b = into_set(r, loc)?;
            Ok(Value::Bool(a.is_subset(&b)))
        }
        B::PSubset => {
            let a = into_set(l, loc)?;
            let b = into_set(r, loc)?;
            Ok(Value::Bool(a.len() < b.len() && a.is_subset(&b)))
        }
        B::Concat => match (l, r) {
            (Value::Seq(mut a), Value::Seq(b)) => {
                a.extend(b);
                Ok(Value::Seq(a))
            }
            (Value::Seq(_), other) | (other, _) => Err(mismatch("a sequence", &other, loc)),
        },
        B::Override => match l {
            Value::Seq(mut s) => {
                for (k, v) in into_map(r, loc)? {
                    match k.as_usize().filter(|i| *i >= 1 && *i <= s.len()) {
                        Some(i) => s[i - 1] = v,
                        None => {
                            return Err(EvalError::runtime(
                                codes::SEQ_INDEX_RANGE,
                                format!("Sequence index {k} out of range"),
                                loc,
                            ))
                        }
                    }
                }
                Ok(Value::Seq(s))
            }
            other => {
                let mut a = into_map(other, loc)?;
                a.extend(into_map(r, loc)?);
                Ok(Value::Map(a))
            }
        },
        B::Munion => {
            let mut a = into_map(l, loc)?;
            for (k, v) in into_map(r, loc)? {
                if let Some(prev) = a.get(&k) {
                    if prev != &v {
                        return Err(EvalError::runtime(
                            codes::MUNION_CLASH,
                            format!("Map key {k} has different values in munion"),
                            loc,
                        ));
                    }
                }
                a.insert(k, v);
            }
            Ok(Value::Map(a))
        }
        B::And | B::Or | B::Implies | B::Iff => {
            let (Value::Bool(a), Value::Bool(b)) = (&l, &r) else {
                let bad = if l.as_bool().is_none() { l } else { r };
                return Err(mismatch("a bool", &bad, loc));
            };
            Ok(Value::Bool(match op {
                B::And => *a && *b,
                B::Or => *a || *b,
                B::Implies => !*a || *b,
                _ => a == b,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::CancelReason;
    use crate::lang::{parse_expression, parse_specification, SpecModule};

    fn eval_in(m: &SpecModule, src: &str) -> EvalResult<Value> {
        let mut ctx = Context::new(m).unwrap();
        ctx.evaluate(&parse_expression(src, "t").unwrap())
    }

    fn eval(src: &str) -> EvalResult<Value> {
        eval_in(&SpecModule::default(), src)
    }

    fn code(r: EvalResult<Value>) -> u32 {
        match r {
            Err(EvalError::Runtime(e)) => e.code,
            other => panic!("expected a runtime error, got {other:?}"),
        }
    }

    #[test]
    fn connectives_short_circuit() {
        assert_eq!(eval("true => false"), Ok(Value::Bool(false)));
        assert_eq!(eval("false => 1/0 = 1"), Ok(Value::Bool(true)));
        assert_eq!(eval("false and 1/0 = 1"), Ok(Value::Bool(false)));
        assert_eq!(eval("true or hd [] = 1"), Ok(Value::Bool(true)));
    }

    #[test]
    fn partial_operators_raise() {
        assert_eq!(code(eval("1/0")), codes::DIVISION_BY_ZERO);
        assert_eq!(code(eval("7 mod 0")), codes::DIVISION_BY_ZERO);
        assert_eq!(code(eval("hd []")), codes::HEAD_OF_EMPTY);
        assert_eq!(code(eval("tl []")), codes::TAIL_OF_EMPTY);
        assert_eq!(code(eval("[1,2](0)")), codes::SEQ_INDEX_NOT_NAT1);
        assert_eq!(code(eval("[1,2](3)")), codes::SEQ_INDEX_RANGE);
        assert_eq!(code(eval("{1 |-> 2}(2)")), codes::MAP_KEY);
        assert_eq!(code(eval("{1 |-> 2} munion {1 |-> 3}")), codes::MUNION_CLASH);
        assert_eq!(code(eval("dinter {}")), codes::DINTER_OF_EMPTY);
        assert_eq!(code(eval("cases 3: 1 -> true end")), codes::CASES_NO_MATCH);
    }

    #[test]
    fn integer_division_conventions() {
        assert_eq!(eval("-7 div 2"), Ok(Value::int(-3)));
        assert_eq!(eval("-7 mod 2"), Ok(Value::int(1)));
        assert_eq!(eval("-7 rem 2"), Ok(Value::int(-1)));
        assert_eq!(eval("7 / 2 * 2"), Ok(Value::int(7)));
        assert_eq!(eval("floor (7 / 2)"), Ok(Value::int(3)));
    }

    #[test]
    fn collections() {
        assert_eq!(eval("inds [5, 6]"), Ok(Value::set([Value::int(1), Value::int(2)])));
        assert_eq!(eval("card {1, ..., 10}"), Ok(Value::int(10)));
        assert_eq!(
            eval("{x * x | x in set {1, 2, 3} & x > 1}"),
            Ok(Value::set([Value::int(4), Value::int(9)]))
        );
        assert_eq!(eval("[x | x in set {3, 1, 2}]"), Ok(Value::seq([1, 2, 3].map(Value::int))));
        assert_eq!(eval("card power {1, 2, 3}"), Ok(Value::int(8)));
        assert_eq!(eval("[1, 2, 3] ++ {2 |-> 9}"), Ok(Value::seq([1, 9, 3].map(Value::int))));
        assert_eq!(eval("mk_(1, true).#2"), Ok(Value::Bool(true)));
    }

    #[test]
    fn quantifiers_over_sets_and_finite_types() {
        assert_eq!(eval("forall x in set {1, 2} & x > 0"), Ok(Value::Bool(true)));
        assert_eq!(eval("exists x in set {1, 2} & x > 1"), Ok(Value::Bool(true)));
        assert_eq!(eval("forall b:bool & b or not b"), Ok(Value::Bool(true)));
        assert_eq!(eval("exists s:set of bool & card s = 2"), Ok(Value::Bool(true)));
        assert_eq!(code(eval("forall n:nat & n >= 0")), codes::INFINITE_BIND);
        assert_eq!(eval("let x in set {4, 5} be st x > 4 in x"), Ok(Value::int(5)));
        assert_eq!(code(eval("let x in set {4, 5} be st x > 5 in x")), codes::LET_BE_NO_MATCH);
    }

    #[test]
    fn records_and_invariants() {
        let m = parse_specification(
            "types\n  R :: a : nat  b : bool;\n  Small = nat inv s == s < 3;\n",
            "t",
        )
        .unwrap();
        assert_eq!(eval_in(&m, "mk_R(1, true).a"), Ok(Value::int(1)));
        assert_eq!(code(eval_in(&m, "mk_R(-1, true)")), codes::NOT_IN_TYPE);
        assert_eq!(eval_in(&m, "is_(2, Small)"), Ok(Value::Bool(true)));
        assert_eq!(eval_in(&m, "is_(3, Small)"), Ok(Value::Bool(false)));
    }

    #[test]
    fn cancellation_is_observed() {
        let m = SpecModule::default();
        let mut ctx = Context::new(&m).unwrap();
        ctx.cancel_token().cancel();
        let e = parse_expression("card {x | x in set {1, ..., 5000} & x > 0}", "t").unwrap();
        assert_eq!(ctx.evaluate(&e), Err(EvalError::Cancelled(CancelReason::Interrupted)));
    }
}
