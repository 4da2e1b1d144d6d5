//! Instrumented evaluation of an obligation's outer quantifier chain.

use std::collections::BTreeMap;

use super::context::{BindOverrides, Context};
use super::error::{CancelReason, EvalError, EvalResult, RuntimeError};
use crate::lang::{Bind, Expr, ExprKind};
use crate::values::Value;

pub type Binding = BTreeMap<String, Value>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Universal,
    Existential,
}

/// What happened when an obligation was evaluated over its bind values.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantifierReport {
    /// `Ok(false)` or a runtime error for a falsified universal, `Ok(true)`
    /// for a satisfied existential, otherwise the value of the quantifier
    /// over the values tried. `Cancelled` on timeout or interrupt.
    pub result: EvalResult<Value>,
    pub failing: Option<Binding>,
    pub witness: Option<Binding>,
    /// Every combination of every bind's complete value set was evaluated
    /// and each evaluation was decisive.
    pub exhausted: bool,
    /// Combinations whose outcome could not be relied on: nested
    /// quantifiers over partial value sets, unbounded binds, step budget.
    pub inconclusive: u64,
    /// The first limit error met, for diagnostics.
    pub first_limit: Option<RuntimeError>,
    pub evaluated: u64,
}

/// Splits an obligation into its outer quantifier binds and body, merging
/// directly nested quantifiers of the same kind.
pub fn quantifier_chain(e: &Expr) -> (Option<Polarity>, Vec<Bind>, &Expr) {
    let (polarity, mut binds, mut body) = match &e.kind {
        ExprKind::Forall { binds, body } => (Polarity::Universal, binds.clone(), &**body),
        ExprKind::Exists { binds, body } => (Polarity::Existential, binds.clone(), &**body),
        _ => return (None, Vec::new(), e),
    };
    while let (ExprKind::Forall { binds: bs, body: b }, Polarity::Universal)
    | (ExprKind::Exists { binds: bs, body: b }, Polarity::Existential) = (&body.kind, polarity)
    {
        binds.extend(bs.iter().cloned());
        body = b;
    }
    (Some(polarity), binds, body)
}

impl<'m> Context<'m> {
    /// Evaluates an obligation with `overrides` supplying the values of its
    /// type binds, recording the first falsifying (universal) or satisfying
    /// (existential) binding.
    pub fn evaluate_quantified(&mut self, e: &Expr, overrides: BindOverrides) -> QuantifierReport {
        self.set_overrides(overrides);
        let report = self.quantified(e);
        self.set_overrides(BindOverrides::default());
        report
    }

    fn quantified(&mut self, e: &Expr) -> QuantifierReport {
        let mut report = QuantifierReport {
            result: Ok(Value::Bool(true)),
            failing: None,
            witness: None,
            exhausted: false,
            inconclusive: 0,
            first_limit: None,
            evaluated: 0,
        };
        let (polarity, binds, body) = quantifier_chain(e);
        let Some(polarity) = polarity else {
            self.tainted = false;
            self.reset_budget();
            report.evaluated = 1;
            let r = self.evaluate(e);
            report.exhausted = !self.tainted && r.is_ok();
            report.result = r;
            return report;
        };
        let universal = polarity == Polarity::Universal;
        report.result = Ok(Value::Bool(universal));
        let lists = match self.bind_lists(&binds, &e.loc) {
            Ok(l) => l,
            Err(err) => {
                report.result = Err(err);
                return report;
            }
        };
        let exhaustive = lists.iter().all(|l| l.exhaustive);
        let mut inconclusive = 0u64;
        let mut first_limit = None;
        let mut evaluated = 0u64;
        let outcome = self.for_each_binding(&binds, &lists, &mut |ctx, mark| {
            ctx.check_cancelled()?;
            ctx.tainted = false;
            ctx.reset_budget();
            evaluated += 1;
            let r = ctx.evaluate(body);
            let decisive = !ctx.tainted;
            match r {
                Ok(Value::Bool(b)) if b != universal && decisive => {
                    Ok(Some((Ok(Value::Bool(b)), ctx.bound_since(mark))))
                }
                Ok(Value::Bool(_)) if decisive => Ok(None),
                Ok(Value::Bool(_)) => {
                    inconclusive += 1;
                    Ok(None)
                }
                Ok(other) => Ok(Some((
                    Err(EvalError::runtime(
                        super::codes::TYPE_MISMATCH,
                        format!("Expected a bool but found {other}"),
                        &body.loc,
                    )),
                    ctx.bound_since(mark),
                ))),
                Err(EvalError::Runtime(err)) if err.is_conclusive() => {
                    if universal {
                        Ok(Some((Err(EvalError::Runtime(err)), ctx.bound_since(mark))))
                    } else {
                        Ok(None)
                    }
                }
                Err(EvalError::Runtime(err)) => {
                    inconclusive += 1;
                    first_limit.get_or_insert(err);
                    Ok(None)
                }
                Err(EvalError::Cancelled(CancelReason::StepBudget)) => {
                    inconclusive += 1;
                    Ok(None)
                }
                Err(cancel) => Err(cancel),
            }
        });
        report.evaluated = evaluated;
        report.inconclusive = inconclusive;
        report.first_limit = first_limit;
        match outcome {
            Ok((Some((result, bound)), _)) => {
                let binding: Binding = bound.into_iter().collect();
                if universal {
                    report.failing = Some(binding);
                } else {
                    report.witness = Some(binding);
                }
                report.result = result;
            }
            Ok((None, complete)) => {
                report.exhausted = complete && exhaustive && inconclusive == 0;
            }
            Err(err) => report.result = Err(err),
        }
        report
    }
}
