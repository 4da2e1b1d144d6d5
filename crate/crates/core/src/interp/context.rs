//! Evaluation context: variable frames, module globals, type arguments,
//! bind overrides and the cancellation machinery.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use super::error::{codes, CancelReason, EvalError, EvalResult, RuntimeError};
use crate::lang::{SpecModule, TypeExpr};
use crate::values::{InvariantOracle, Value};

/// Node visits allowed per binding.
pub const STEP_BUDGET: u64 = 10_000_000;
/// Maximum nesting of function calls.
pub const MAX_CALL_DEPTH: usize = 1_000;
/// Combinations allowed per quantifier.
pub const PRODUCT_CAP: u64 = 1_000_000;
/// Largest finite type a bind without an override may enumerate.
pub const ENUMERATION_LIMIT: u64 = 100_000;

const CHECK_INTERVAL: u64 = 256;

/// A shareable flag that stops evaluation when set.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }
}

/// Values supplied for one type bind.
#[derive(Clone, Debug, PartialEq)]
pub struct BindOverride {
    pub name: String,
    pub ty: TypeExpr,
    pub values: Vec<Value>,
    /// The list holds every value of the type.
    pub all_values: bool,
}

/// Value lists for the type binds of an obligation, keyed by variable name
/// and (substituted) type.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BindOverrides {
    pub entries: Vec<BindOverride>,
}

impl BindOverrides {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, ty: TypeExpr, values: Vec<Value>, all_values: bool) {
        self.entries.retain(|e| !(e.name == name && e.ty == ty));
        self.entries.push(BindOverride {
            name: name.to_string(),
            ty,
            values,
            all_values,
        });
    }

    pub fn get(&self, name: &str, ty: &TypeExpr) -> Option<&BindOverride> {
        self.entries.iter().find(|e| e.name == name && &e.ty == ty)
    }
}

/// Per-evaluation state. One context serves one obligation at a time.
pub struct Context<'m> {
    pub module: &'m SpecModule,
    globals: Arc<HashMap<String, Value>>,
    env: Vec<(String, Value)>,
    frame_base: usize,
    pub(crate) type_args: HashMap<String, TypeExpr>,
    pub(crate) overrides: BindOverrides,
    pub(crate) call_depth: usize,
    cancel: CancelToken,
    deadline: Option<Instant>,
    steps: u64,
    budget_used: u64,
    /// Set when a nested quantifier completed over values that were not
    /// exhaustive, so its result may be wrong.
    pub(crate) tainted: bool,
    pub diagnostics: Vec<String>,
}

impl<'m> Context<'m> {
    /// Creates a context and evaluates the module's value definitions.
    pub fn new(module: &'m SpecModule) -> Result<Self, RuntimeError> {
        let mut ctx = Context::with_globals(module, Arc::new(HashMap::new()));
        for v in &module.values {
            let value = match ctx.evaluate(&v.value) {
                Ok(value) => value,
                Err(EvalError::Runtime(e)) => return Err(e),
                Err(EvalError::Cancelled(r)) => {
                    return Err(RuntimeError::new(
                        codes::TOO_LARGE,
                        format!("value {} could not be evaluated ({r})", v.name),
                        &v.loc,
                    ))
                }
            };
            Arc::make_mut(&mut ctx.globals).insert(v.name.clone(), value);
        }
        Ok(ctx)
    }

    /// Creates a context over already evaluated globals.
    pub fn with_globals(module: &'m SpecModule, globals: Arc<HashMap<String, Value>>) -> Self {
        Context {
            module,
            globals,
            env: Vec::new(),
            frame_base: 0,
            type_args: HashMap::new(),
            overrides: BindOverrides::default(),
            call_depth: 0,
            cancel: CancelToken::new(),
            deadline: None,
            steps: 0,
            budget_used: 0,
            tainted: false,
            diagnostics: Vec::new(),
        }
    }

    /// A fresh context sharing this one's module and globals.
    pub fn fork(&self) -> Context<'m> {
        Context::with_globals(self.module, Arc::clone(&self.globals))
    }

    pub fn globals(&self) -> &Arc<HashMap<String, Value>> {
        &self.globals
    }

    pub fn set_cancel_token(&mut self, token: CancelToken) {
        self.cancel = token;
    }

    pub fn cancel_token(&self) -> &CancelToken {
        &self.cancel
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    pub fn set_overrides(&mut self, overrides: BindOverrides) {
        self.overrides = overrides;
    }

    pub fn overrides(&self) -> &BindOverrides {
        &self.overrides
    }

    pub fn set_type_args(&mut self, args: HashMap<String, TypeExpr>) {
        self.type_args = args;
    }

    pub fn type_args(&self) -> &HashMap<String, TypeExpr> {
        &self.type_args
    }

    /// Substitutes the current type arguments into `t`.
    pub fn concrete(&self, t: &TypeExpr) -> TypeExpr {
        if self.type_args.is_empty() || !t.has_type_params() {
            return t.clone();
        }
        t.substitute(&|p| self.type_args.get(p).cloned())
    }

    pub(crate) fn reset_budget(&mut self) {
        self.budget_used = 0;
    }

    /// Counts one step; checks cancellation and the deadline periodically.
    pub(crate) fn tick(&mut self) -> EvalResult<()> {
        self.steps += 1;
        self.budget_used += 1;
        if self.steps.is_multiple_of(CHECK_INTERVAL) {
            self.check_cancelled()?;
        }
        if self.budget_used > STEP_BUDGET {
            return Err(EvalError::Cancelled(CancelReason::StepBudget));
        }
        Ok(())
    }

    pub fn check_cancelled(&self) -> EvalResult<()> {
        if self.cancel.is_cancelled() {
            return Err(EvalError::Cancelled(CancelReason::Interrupted));
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(EvalError::Cancelled(CancelReason::Timeout));
        }
        Ok(())
    }

    pub fn bind(&mut self, name: &str, value: Value) {
        self.env.push((name.to_string(), value));
    }

    pub fn bind_all(&mut self, bindings: impl IntoIterator<Item = (String, Value)>) {
        self.env.extend(bindings);
    }

    pub(crate) fn mark(&self) -> usize {
        self.env.len()
    }

    pub(crate) fn env_slice(&self, mark: usize) -> &[(String, Value)] {
        &self.env[mark..]
    }

    pub(crate) fn restore(&mut self, mark: usize) {
        self.env.truncate(mark);
    }

    /// Starts a call frame: locals of the caller become invisible.
    pub(crate) fn enter_frame(&mut self) -> (usize, usize) {
        let saved = (self.frame_base, self.env.len());
        self.frame_base = self.env.len();
        saved
    }

    pub(crate) fn leave_frame(&mut self, saved: (usize, usize)) {
        self.env.truncate(saved.1);
        self.frame_base = saved.0;
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.env[self.frame_base..]
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .or_else(|| self.globals.get(name))
    }

    /// True if `name` is a local variable or a global value.
    pub fn is_bound(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }
}

impl InvariantOracle for Context<'_> {
    fn invariant_holds(&mut self, type_name: &str, v: &Value) -> bool {
        match self.check_invariant(type_name, v) {
            Ok(b) => b,
            Err(e) => {
                self.diagnostics
                    .push(format!("invariant of {type_name} failed to evaluate on {v}: {e}"));
                false
            }
        }
    }
}
