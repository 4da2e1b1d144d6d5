//! Function calls, including the derived `pre_`, `post_` and `inv_`
//! functions.

use std::collections::HashMap;

use super::context::{Context, MAX_CALL_DEPTH};
use super::error::{codes, EvalError, EvalResult};
use super::pattern::match_pattern;
use crate::lang::{FunctionDef, Location, TypeExpr};
use crate::values::{type_membership, Value};

impl<'m> Context<'m> {
    /// Calls a function, derived function or invariant by name.
    pub fn call_named(
        &mut self,
        name: &str,
        type_args: Option<Vec<TypeExpr>>,
        args: Vec<Value>,
        loc: &Location,
    ) -> EvalResult<Value> {
        let m = self.module;
        if let Some(f) = m.function(name) {
            return self.call_function(f, args, type_args, loc);
        }
        if let Some(f) = name.strip_prefix("pre_").and_then(|b| m.function(b)) {
            return self
                .with_type_args(f, type_args, |ctx| ctx.call_condition(f, args, false, loc))
                .map(Value::Bool);
        }
        if let Some(f) = name.strip_prefix("post_").and_then(|b| m.function(b)) {
            return self
                .with_type_args(f, type_args, |ctx| ctx.call_condition(f, args, true, loc))
                .map(Value::Bool);
        }
        if let Some(t) = name.strip_prefix("inv_").filter(|t| m.type_def(t).is_some()) {
            let [v] = <[Value; 1]>::try_from(args).map_err(|_| arity(name, 1, loc))?;
            return self.check_invariant_at(t, &v, loc).map(Value::Bool);
        }
        if m.state_field(name).is_some() {
            return Err(EvalError::runtime(
                codes::STATE_UNAVAILABLE,
                format!("State field {name} is not available"),
                loc,
            ));
        }
        Err(EvalError::runtime(
            codes::TYPE_MISMATCH,
            format!("Unknown function {name}"),
            loc,
        ))
    }

    /// Calls `f`: checks the arguments against the parameter types, the
    /// precondition, then evaluates the body and checks the result type and
    /// postcondition. Without explicit type arguments the caller's are kept.
    pub fn call_function(
        &mut self,
        f: &FunctionDef,
        args: Vec<Value>,
        type_args: Option<Vec<TypeExpr>>,
        loc: &Location,
    ) -> EvalResult<Value> {
        if args.len() != f.params.len() {
            return Err(arity(&f.name, f.params.len(), loc));
        }
        self.with_type_args(f, type_args, |ctx| {
            let m = ctx.module;
            for (v, t) in args.iter().zip(&f.param_types) {
                let t = ctx.concrete(t);
                if !type_membership(v, &t, m, ctx) {
                    return Err(EvalError::runtime(
                        codes::NOT_IN_TYPE,
                        format!("Value {v} is not a {t}"),
                        loc,
                    ));
                }
            }
            ctx.in_call(loc, |ctx| {
                ctx.bind_params(f, args.clone(), loc)?;
                if let Some(pre) = &f.pre {
                    if !ctx.eval_bool(pre)? {
                        return Err(EvalError::runtime(
                            codes::PRECONDITION,
                            format!("Precondition failure: pre_{}", f.name),
                            loc,
                        ));
                    }
                }
                let result = ctx.evaluate(&f.body)?;
                let rt = ctx.concrete(&f.return_type);
                if !type_membership(&result, &rt, m, ctx) {
                    return Err(EvalError::runtime(
                        codes::NOT_IN_TYPE,
                        format!("Value {result} is not a {rt}"),
                        &f.body.loc,
                    ));
                }
                if let Some(post) = &f.post {
                    ctx.bind("RESULT", result.clone());
                    if !ctx.eval_bool(post)? {
                        return Err(EvalError::runtime(
                            codes::POSTCONDITION,
                            format!("Postcondition failure: post_{}", f.name),
                            loc,
                        ));
                    }
                }
                Ok(result)
            })
        })
    }

    /// Evaluates the pre- or postcondition of `f` as a total boolean
    /// function. An absent condition is true.
    fn call_condition(&mut self, f: &FunctionDef, mut args: Vec<Value>, post: bool, loc: &Location) -> EvalResult<bool> {
        let cond = if post { &f.post } else { &f.pre };
        let expected = f.params.len() + usize::from(post);
        if args.len() != expected {
            let name = format!("{}_{}", if post { "post" } else { "pre" }, f.name);
            return Err(arity(&name, expected, loc));
        }
        let Some(cond) = cond else {
            return Ok(true);
        };
        self.in_call(loc, |ctx| {
            let result = post.then(|| args.pop()).flatten();
            for (p, v) in f.params.iter().zip(args) {
                match match_pattern(p, &v) {
                    Some(bs) => ctx.bind_all(bs),
                    None => return Ok(false),
                }
            }
            if let Some(r) = result {
                ctx.bind("RESULT", r);
            }
            ctx.eval_bool(cond)
        })
    }

    /// Evaluates the invariant of the named type on `v`; true if there is
    /// none or the value does not match the invariant pattern's shape.
    pub fn check_invariant(&mut self, type_name: &str, v: &Value) -> EvalResult<bool> {
        let loc = match self.module.type_def(type_name) {
            Some(d) => d.loc.clone(),
            None => return Ok(true),
        };
        self.check_invariant_at(type_name, v, &loc)
    }

    fn check_invariant_at(&mut self, type_name: &str, v: &Value, loc: &Location) -> EvalResult<bool> {
        let m = self.module;
        let Some((p, e)) = m.type_def(type_name).and_then(|d| d.invariant.as_ref()) else {
            return Ok(true);
        };
        let Some(bindings) = match_pattern(p, v) else {
            return Ok(false);
        };
        self.in_call(loc, |ctx| {
            ctx.bind_all(bindings);
            ctx.eval_bool(e)
        })
    }

    fn bind_params(&mut self, f: &FunctionDef, args: Vec<Value>, loc: &Location) -> EvalResult<()> {
        for (p, v) in f.params.iter().zip(args) {
            match match_pattern(p, &v) {
                Some(bs) => self.bind_all(bs),
                None => {
                    return Err(EvalError::runtime(
                        codes::PATTERN_MISMATCH,
                        format!("Value {v} does not match parameter pattern {p}"),
                        loc,
                    ))
                }
            }
        }
        Ok(())
    }

    /// Runs `body` in a fresh call frame one level deeper.
    pub(crate) fn in_call<T>(&mut self, loc: &Location, body: impl FnOnce(&mut Self) -> EvalResult<T>) -> EvalResult<T> {
        if self.call_depth >= MAX_CALL_DEPTH {
            return Err(EvalError::runtime(
                codes::RECURSION_LIMIT,
                format!("Recursion depth limit of {MAX_CALL_DEPTH} reached"),
                loc,
            ));
        }
        let saved = self.enter_frame();
        self.call_depth += 1;
        let r = body(self);
        self.call_depth -= 1;
        self.leave_frame(saved);
        r
    }

    fn with_type_args<T>(
        &mut self,
        f: &FunctionDef,
        type_args: Option<Vec<TypeExpr>>,
        body: impl FnOnce(&mut Self) -> EvalResult<T>,
    ) -> EvalResult<T> {
        match type_args {
            None => body(self),
            Some(ta) => {
                let args: HashMap<String, TypeExpr> = f.type_params.iter().cloned().zip(ta).collect();
                let saved = std::mem::replace(&mut self.type_args, args);
                let r = body(self);
                self.type_args = saved;
                r
            }
        }
    }
}

fn arity(name: &str, expected: usize, loc: &Location) -> EvalError {
    EvalError::runtime(
        codes::TYPE_MISMATCH,
        format!("{name} expects {expected} argument(s)"),
        loc,
    )
}
