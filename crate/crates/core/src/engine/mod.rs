//! Checking obligations: run the strategies, merge their values, evaluate
//! the obligation over them and derive a status.

pub mod report;
pub mod rerun;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use crate::interp::{
    with_big_stack, BindOverrides, Binding, CancelReason, CancelToken, Context, EvalError, Polarity, RuntimeError,
    EVAL_STACK_SIZE,
};
use crate::lang::{SpecModule, TypeExpr};
use crate::pog::ProofObligation;
use crate::strategies::fixed::DEFAULT_FIXED_SIZE;
use crate::strategies::{request_binds, RequestBind, StrategyRequest, StrategyResult, StrategySet, Verdict};
use crate::values::{fixed_values, Value};

pub use report::{format_elapsed, render_binding, render_result};
pub use rerun::{rerun_counterexample, Rerun};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(1);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Provable(String),
    Failed,
    Maybe,
    Timeout,
    Unchecked,
}

impl Status {
    /// Lower-case name used by `-i` filters.
    pub fn filter_name(&self) -> &'static str {
        match self {
            Status::Provable(_) => "provable",
            Status::Failed => "failed",
            Status::Maybe => "maybe",
            Status::Timeout => "timeout",
            Status::Unchecked => "unchecked",
        }
    }

    pub const FILTER_NAMES: [&'static str; 5] = ["failed", "provable", "maybe", "timeout", "unchecked"];
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.filter_name().to_uppercase())
    }
}

/// The outcome of checking one obligation.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckedResult {
    pub number: usize,
    pub status: Status,
    pub elapsed: Duration,
    pub counterexample: Option<Binding>,
    pub witness: Option<Binding>,
    /// The type parameter assignment the counterexample or witness was
    /// found under.
    pub type_args: BTreeMap<String, TypeExpr>,
    pub message: Option<String>,
    pub diagnostics: Vec<String>,
}

impl CheckedResult {
    fn new(number: usize, status: Status) -> Self {
        CheckedResult {
            number,
            status,
            elapsed: Duration::ZERO,
            counterexample: None,
            witness: None,
            type_args: BTreeMap::new(),
            message: None,
            diagnostics: Vec::new(),
        }
    }
}

/// Everything that controls a checking run.
#[derive(Debug)]
pub struct RunSettings {
    pub timeout: Duration,
    pub strategies: StrategySet,
    /// Obligations checked concurrently; 1 checks them in order.
    pub workers: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            timeout: DEFAULT_TIMEOUT,
            strategies: StrategySet::builtin(),
            workers: 1,
        }
    }
}

/// Type parameter assignments to try: the product of the annotated
/// candidates, with `real` for parameters without an annotation.
pub fn assign_type_params(po: &ProofObligation, m: &SpecModule) -> Vec<BTreeMap<String, TypeExpr>> {
    let mut out = vec![BTreeMap::new()];
    for p in &po.type_params {
        let candidates: Vec<TypeExpr> = m
            .annotations_for(&po.owner)
            .find(|a| a.param == *p)
            .map(|a| a.candidates.clone())
            .unwrap_or_else(|| vec![TypeExpr::Real]);
        out = out
            .into_iter()
            .flat_map(|assignment| {
                candidates.iter().map(move |c| {
                    let mut a = assignment.clone();
                    a.insert(p.clone(), c.clone());
                    a
                })
            })
            .collect();
    }
    out
}

/// Checks obligations of one module. Value definitions are evaluated once.
pub struct Checker<'m> {
    module: &'m SpecModule,
    globals: Arc<HashMap<String, Value>>,
}

/// What one type parameter assignment concluded.
enum Round {
    Done(CheckedResult),
    Interrupted,
}

impl<'m> Checker<'m> {
    pub fn new(module: &'m SpecModule) -> Result<Self, RuntimeError> {
        let globals = with_big_stack(|| Context::new(module).map(|c| Arc::clone(c.globals())))?;
        Ok(Checker { module, globals })
    }

    pub fn module(&self) -> &'m SpecModule {
        self.module
    }

    pub(crate) fn context(&self) -> Context<'m> {
        Context::with_globals(self.module, Arc::clone(&self.globals))
    }

    /// Checks one obligation. `None` if `cancel` fired first.
    pub fn check_po(&self, po: &ProofObligation, settings: &RunSettings, cancel: &CancelToken) -> Option<CheckedResult> {
        with_big_stack(|| self.check(po, settings, cancel))
    }

    fn check(&self, po: &ProofObligation, settings: &RunSettings, cancel: &CancelToken) -> Option<CheckedResult> {
        if !po.executable {
            return Some(CheckedResult::new(po.number, Status::Unchecked));
        }
        let start = Instant::now();
        let deadline = start + settings.timeout;
        let mut rounds = Vec::new();
        for type_args in assign_type_params(po, self.module) {
            match self.round(po, settings, cancel, deadline, type_args) {
                Round::Interrupted => return None,
                Round::Done(r) => {
                    let stop = matches!(r.status, Status::Failed | Status::Timeout);
                    rounds.push(r);
                    if stop {
                        break;
                    }
                }
            }
        }
        let mut result = combine(po.number, rounds);
        result.elapsed = start.elapsed();
        Some(result)
    }

    fn round(
        &self,
        po: &ProofObligation,
        settings: &RunSettings,
        cancel: &CancelToken,
        deadline: Instant,
        type_args: BTreeMap<String, TypeExpr>,
    ) -> Round {
        let mut ctx = self.context();
        ctx.set_cancel_token(cancel.clone());
        ctx.set_deadline(Some(deadline));
        ctx.set_type_args(type_args.iter().map(|(k, v)| (k.clone(), v.clone())).collect());
        let binds = request_binds(po, &type_args);
        let mut result = CheckedResult::new(po.number, Status::Maybe);
        result.type_args = type_args.clone();

        let mut outputs: Vec<StrategyResult> = Vec::new();
        for s in settings.strategies.enabled() {
            if cancel.is_cancelled() {
                return Round::Interrupted;
            }
            if Instant::now() >= deadline {
                result.status = Status::Timeout;
                return Round::Done(result);
            }
            let out = s.run(&mut StrategyRequest {
                po,
                binds: &binds,
                ctx: &mut ctx,
                type_args: &type_args,
            });
            result.diagnostics.extend(out.diagnostics.iter().cloned());
            outputs.push(out);
        }
        if cancel.is_cancelled() {
            return Round::Interrupted;
        }
        if Instant::now() >= deadline {
            result.status = Status::Timeout;
            return Round::Done(result);
        }

        let verdicts: Vec<&Verdict> = outputs.iter().filter_map(|o| o.verdict.as_ref()).collect();
        if let Some(cex) = verdicts.iter().find_map(|v| match v {
            Verdict::Disproved { counterexample } => Some(counterexample),
            _ => None,
        }) {
            result.status = Status::Failed;
            result.counterexample = Some(cex.clone());
            return Round::Done(result);
        }
        if let Some((reason, witness)) = verdicts.iter().find_map(|v| match v {
            Verdict::Proved { reason, witness } => Some((reason, witness)),
            _ => None,
        }) {
            result.status = Status::Provable(reason.clone());
            result.witness = witness.clone();
            return Round::Done(result);
        }

        let (overrides, has_all_values) = merge(&binds, &outputs, &mut ctx);
        let report = ctx.evaluate_quantified(&po.expr, overrides);
        result.diagnostics.append(&mut ctx.diagnostics);
        let universal = po.polarity == Polarity::Universal;
        let conclusive = has_all_values && report.exhausted;
        match report.result {
            Err(EvalError::Cancelled(CancelReason::Interrupted)) => return Round::Interrupted,
            Err(EvalError::Cancelled(_)) => result.status = Status::Timeout,
            Err(EvalError::Runtime(e)) => match report.failing {
                Some(b) => {
                    result.status = Status::Failed;
                    result.counterexample = Some(b);
                    result.message = Some(e.to_string());
                }
                None if binds.is_empty() && e.is_conclusive() && universal => {
                    result.status = Status::Failed;
                    result.counterexample = Some(Binding::new());
                    result.message = Some(e.to_string());
                }
                None => result.message = Some(e.to_string()),
            },
            Ok(Value::Bool(b)) if universal => {
                if !b {
                    result.status = Status::Failed;
                    result.counterexample = Some(report.failing.unwrap_or_default());
                    result.message = Some("Obligation is false".into());
                } else if conclusive {
                    result.status = Status::Provable("finite types".into());
                }
            }
            Ok(Value::Bool(b)) => {
                if b {
                    let w = report.witness.unwrap_or_default();
                    result.status = Status::Provable(format!("witness {}", render_binding(&w)));
                    result.witness = Some(w);
                } else if conclusive {
                    result.status = Status::Failed;
                    result.counterexample = Some(Binding::new());
                    result.message = Some("No witness exists".into());
                }
            }
            Ok(other) => result.message = Some(format!("Obligation evaluated to {other}")),
        }
        if result.status == Status::Maybe {
            if let Some(limit) = report.first_limit {
                result.message.get_or_insert_with(|| limit.to_string());
            }
        }
        Round::Done(result)
    }

    /// Checks `pos` and returns their results in obligation order.
    /// `progress` sees each result as it completes. Obligations not finished
    /// when `cancel` fires are left out.
    pub fn run_batch(
        &self,
        pos: &[&ProofObligation],
        settings: &RunSettings,
        cancel: &CancelToken,
        progress: &(dyn Fn(&CheckedResult) + Sync),
    ) -> Vec<CheckedResult> {
        let workers = settings.workers.clamp(1, pos.len().max(1));
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<CheckedResult>> = Mutex::new(Vec::new());
        let work = || {
            loop {
                if cancel.is_cancelled() {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(po) = pos.get(i) else {
                    break;
                };
                match self.check(po, settings, cancel) {
                    Some(r) => {
                        progress(&r);
                        results.lock().expect("results lock").push(r);
                    }
                    None => break,
                }
            }
        };
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    std::thread::Builder::new()
                        .stack_size(EVAL_STACK_SIZE)
                        .spawn_scoped(s, work)
                        .expect("failed to spawn checking thread")
                })
                .collect();
            for h in handles {
                if let Err(p) = h.join() {
                    std::panic::resume_unwind(p);
                }
            }
        });
        let mut out = results.into_inner().expect("results lock");
        out.sort_by_key(|r| r.number);
        out
    }
}

/// Combines the values the strategies proposed, per bind, in strategy
/// order without duplicates. Binds nobody populated get fixed values.
fn merge(binds: &[RequestBind], outputs: &[StrategyResult], ctx: &mut Context<'_>) -> (BindOverrides, bool) {
    let mut overrides = BindOverrides::new();
    let mut all = true;
    for b in binds {
        let mut values: Vec<Value> = Vec::new();
        let mut complete = false;
        for o in outputs {
            for bv in o.bindings.iter().filter(|bv| bv.name == b.name && bv.ty == b.ty) {
                complete |= bv.complete;
                for v in &bv.values {
                    if !values.contains(v) {
                        values.push(v.clone());
                    }
                }
            }
        }
        if values.is_empty() && !complete {
            values = fixed_values(&b.ty, DEFAULT_FIXED_SIZE, ctx.module, ctx);
        }
        all &= complete;
        overrides.insert(&b.name, b.ty.clone(), values, complete);
    }
    (overrides, all)
}

/// The overall result across type parameter assignments: the first FAILED
/// or TIMEOUT, PROVABLE only if every assignment was, otherwise MAYBE.
fn combine(number: usize, rounds: Vec<CheckedResult>) -> CheckedResult {
    if let Some(r) = rounds
        .iter()
        .find(|r| matches!(r.status, Status::Failed | Status::Timeout))
    {
        return r.clone();
    }
    if !rounds.is_empty() && rounds.iter().all(|r| matches!(r.status, Status::Provable(_))) {
        return rounds[0].clone();
    }
    let mut out = CheckedResult::new(number, Status::Maybe);
    for r in rounds {
        out.diagnostics.extend(r.diagnostics);
        if out.message.is_none() {
            out.message = r.message;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::testing::{module, pos};

    const ITEM_AT: &str = "functions\n    itemAt: seq of nat * nat -> nat\n    itemAt(list, index) == list(index);\n";
    const ITEM_AT_PRE: &str =
        "functions\n    itemAt: seq of nat * nat -> nat\n    itemAt(list, index) == list(index)\n    pre index in set inds list;\n";
    const ITEM_AT_IF: &str = "functions\n    itemAt: seq of nat * nat -> nat\n    itemAt(list, index) ==\n        if index in set inds list\n        then list(index)\n        else 0;\n";

    fn check_all(src: &str, settings: &RunSettings) -> (SpecModule, Vec<ProofObligation>, Vec<CheckedResult>) {
        let m = module(src);
        let pos = pos(&m);
        let results = {
            let checker = Checker::new(&m).unwrap();
            let refs: Vec<&ProofObligation> = pos.iter().collect();
            checker.run_batch(&refs, settings, &CancelToken::new(), &|_| {})
        };
        (m, pos, results)
    }

    fn check(src: &str) -> (SpecModule, Vec<ProofObligation>, Vec<CheckedResult>) {
        check_all(src, &RunSettings::default())
    }

    fn binding(pairs: &[(&str, Value)]) -> Binding {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn unguarded_apply_fails_on_empty_list() {
        let (m, pos, rs) = check(ITEM_AT);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].status, Status::Failed);
        assert_eq!(
            rs[0].counterexample,
            Some(binding(&[("index", Value::int(0)), ("list", Value::seq([]))]))
        );
        let mut r = rs[0].clone();
        r.elapsed = Duration::from_millis(13);
        assert_eq!(
            render_result(&r, &pos[0]),
            "PO #1, FAILED in 0.013s: Counterexample: index = 0, list = []\n----\nitemAt: sequence apply obligation in test.vdmsl at line 3:28\n(forall list:seq of nat, index:nat &\n  index in set inds list)\n\n"
        );
        let checker = Checker::new(&m).unwrap();
        let rerun = rerun_counterexample(&checker, &pos[0], Some(&rs[0]));
        assert_eq!(
            rerun.render(&m),
            "=> print itemAt([], 0)\nError 4064: Value 0 is not a nat1 in test.vdmsl at line 3:28\n3:      itemAt(list, index) == list(index);\n"
        );
    }

    #[test]
    fn precondition_guard_gives_maybe() {
        let (_, _, rs) = check(ITEM_AT_PRE);
        assert_eq!(rs[0].status, Status::Maybe);
    }

    #[test]
    fn if_guard_is_trivial() {
        let (_, pos, rs) = check(ITEM_AT_IF);
        assert_eq!(rs[0].status, Status::Provable("trivial index in set (inds list)".into()));
        let mut r = rs[0].clone();
        r.elapsed = Duration::from_millis(1);
        assert_eq!(
            render_result(&r, &pos[0]),
            "PO #1, PROVABLE by trivial index in set (inds list) in 0.001s\n"
        );
    }

    #[test]
    fn small_types_are_proved_by_enumeration() {
        let m = module("values\n  v = 1;\n");
        let mut po = pos(&module(ITEM_AT)).remove(0);
        po.expr = crate::lang::parse_expression("forall s:set of bool & card s <= 2", "test.vdmsl").unwrap();
        po.params.clear();
        let checker = Checker::new(&m).unwrap();
        let r = checker.check_po(&po, &RunSettings::default(), &CancelToken::new()).unwrap();
        assert_eq!(r.status, Status::Provable("finite types".into()));
        po.expr = crate::lang::parse_expression("forall s:set of bool & card s <= 1", "test.vdmsl").unwrap();
        let r = checker.check_po(&po, &RunSettings::default(), &CancelToken::new()).unwrap();
        assert_eq!(r.status, Status::Failed);
        assert_eq!(r.counterexample.unwrap()["s"].to_string(), "{false, true}");
    }

    #[test]
    fn existential_witness_and_absence() {
        let m = module("values\n  v = 1;\n");
        let mut po = pos(&module(ITEM_AT)).remove(0);
        po.polarity = Polarity::Existential;
        po.expr = crate::lang::parse_expression("exists x:nat & x * x = 9", "test.vdmsl").unwrap();
        let checker = Checker::new(&m).unwrap();
        let r = checker.check_po(&po, &RunSettings::default(), &CancelToken::new()).unwrap();
        assert_eq!(r.status, Status::Provable("witness x = 3".into()));
        po.expr = crate::lang::parse_expression("exists b:bool & b <> b", "test.vdmsl").unwrap();
        let r = checker.check_po(&po, &RunSettings::default(), &CancelToken::new()).unwrap();
        assert_eq!(r.status, Status::Failed);
        assert_eq!(r.message.as_deref(), Some("No witness exists"));
    }

    #[test]
    fn state_obligations_are_unchecked() {
        let (_, pos, rs) = check(
            "state S of\n  xs : seq of nat\n  init s == s = mk_S([])\nend\nfunctions\n  f: nat -> nat\n  f(i) == xs(i);\n",
        );
        assert!(!rs.is_empty());
        let r = rs.iter().find(|r| !pos[r.number - 1].executable).unwrap();
        assert_eq!(r.status, Status::Unchecked);
        assert_eq!(render_result(r, &pos[r.number - 1]), format!("PO #{}, UNCHECKED\n", r.number));
    }

    #[test]
    fn slow_obligations_time_out() {
        let src = "functions\n  fib: nat -> nat\n  fib(n) == if n < 2 then n else fib(n - 1) + fib(n - 2);\n  g: nat -> nat\n  g(n) == 10 div (fib(n + 25) - fib(n + 25));\n";
        let settings = RunSettings {
            timeout: Duration::from_millis(300),
            ..RunSettings::default()
        };
        let start = Instant::now();
        let (_, _, rs) = check_all(src, &settings);
        let r = rs.iter().find(|r| r.status == Status::Timeout).expect("a timeout");
        assert!(r.elapsed < Duration::from_millis(800), "{:?}", r.elapsed);
        assert!(start.elapsed() < Duration::from_secs(5));
    }

    #[test]
    fn type_parameters_default_to_real() {
        let (_, pos, rs) = check("functions\n  f[@T]: seq of @T * nat -> @T\n  f(s, i) == s(i);\n");
        assert_eq!(rs[0].status, Status::Failed);
        let mut r = rs[0].clone();
        r.elapsed = Duration::from_millis(8);
        assert!(render_result(&r, &pos[0])
            .starts_with("PO #1, FAILED in 0.008s: Counterexample: i = 0, s = [],\n  T = real\n----\n"));
    }

    #[test]
    fn annotated_type_parameters() {
        let src = "functions\n  -- @QuickCheck @T = set of nat, set of bool;\n  f[@T]: seq of @T * nat -> @T\n  f(s, i) == s(i);\n";
        let m = module(src);
        let pos = pos(&m);
        let assignments = assign_type_params(&pos[0], &m);
        assert_eq!(assignments.len(), 2);
        let (_, _, rs) = check(src);
        assert_eq!(rs[0].type_args["T"].explicit(), "set of (nat)");
    }

    #[test]
    fn disabling_strategies_never_flips_a_verdict() {
        let (_, _, all) = check(ITEM_AT_IF);
        let mut settings = RunSettings::default();
        settings.strategies.enable_only(&["fixed".into()]).unwrap();
        let (_, _, some) = check_all(ITEM_AT_IF, &settings);
        assert!(matches!(all[0].status, Status::Provable(_)));
        assert_ne!(some[0].status, Status::Failed);
    }

    #[test]
    fn batch_results_are_in_order_with_workers() {
        let src = "functions\n  f: seq of nat * nat -> nat\n  f(s, i) == s(i);\n  g: nat -> nat\n  g(n) == 10 div n;\n  h: seq of nat -> nat\n  h(s) == hd s;\n";
        let settings = RunSettings {
            workers: 3,
            ..RunSettings::default()
        };
        let (_, _, rs) = check_all(src, &settings);
        let numbers: Vec<usize> = rs.iter().map(|r| r.number).collect();
        assert_eq!(numbers, [1, 2, 3]);
        assert!(rs.iter().all(|r| r.status == Status::Failed));
    }

    #[test]
    fn rerun_needs_a_binding() {
        let m = module(ITEM_AT);
        let pos = pos(&m);
        let checker = Checker::new(&m).unwrap();
        assert_eq!(
            rerun_counterexample(&checker, &pos[0], None),
            Rerun::NotRunnable(rerun::NO_BINDING_MESSAGE.into())
        );
        let mut r = CheckedResult::new(1, Status::Failed);
        r.counterexample = Some(binding(&[("list", Value::seq([]))]));
        assert!(matches!(rerun_counterexample(&checker, &pos[0], Some(&r)), Rerun::NotRunnable(_)));
    }
}
