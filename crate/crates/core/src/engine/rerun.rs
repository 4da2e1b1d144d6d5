//! Re-running an obligation's function on its counterexample or witness.

use super::{CheckedResult, Checker};
use crate::interp::{literal_value, with_big_stack, Binding, EvalError, EvalResult};
use crate::lang::{Pattern, SpecModule, TypeExpr};
use crate::pog::ProofObligation;
use crate::values::Value;

pub const NO_BINDING_MESSAGE: &str = "Obligation does not have a counterexample/witness. Run qc?";

#[derive(Clone, Debug, PartialEq)]
pub enum Rerun {
    /// The call could not be built; the text says why.
    NotRunnable(String),
    Ran {
        /// The equivalent `print` command.
        command: String,
        outcome: EvalResult<Value>,
    },
}

impl Rerun {
    /// The transcript shown for the rerun: the command echo, then the value
    /// or the error with the offending source line.
    pub fn render(&self, m: &SpecModule) -> String {
        match self {
            Rerun::NotRunnable(msg) => format!("{msg}\n"),
            Rerun::Ran { command, outcome } => {
                let mut out = format!("=> {command}\n");
                match outcome {
                    Ok(v) => out.push_str(&format!("= {v}\n")),
                    Err(EvalError::Runtime(e)) => {
                        out.push_str(&format!("{e}\n"));
                        if let Some(line) = m.source_line(&e.loc.file, e.loc.line) {
                            out.push_str(&format!("{}:      {}\n", e.loc.line, line.trim()));
                        }
                    }
                    Err(e) => out.push_str(&format!("{e}\n")),
                }
                out
            }
        }
    }
}

/// Calls the function owning `po` with arguments taken from the binding in
/// `result`. Every parameter must be recoverable from the binding.
pub fn rerun_counterexample(checker: &Checker<'_>, po: &ProofObligation, result: Option<&CheckedResult>) -> Rerun {
    let binding = result.and_then(|r| {
        r.counterexample
            .as_ref()
            .filter(|b| !b.is_empty())
            .or(r.witness.as_ref())
            .map(|b| (b, &r.type_args))
    });
    let Some((binding, type_args)) = binding else {
        return Rerun::NotRunnable(NO_BINDING_MESSAGE.into());
    };
    let m = checker.module();
    let Some(f) = m.function(&po.owner) else {
        return Rerun::NotRunnable(format!("{} is not a function", po.owner));
    };
    let mut args = Vec::new();
    for p in &po.params {
        match pattern_value(p, binding) {
            Some(v) => args.push(v),
            None => {
                return Rerun::NotRunnable(format!(
                    "Counterexample does not bind every parameter of {}",
                    f.name
                ))
            }
        }
    }
    let targs: Option<Vec<TypeExpr>> = (!f.type_params.is_empty()).then(|| {
        f.type_params
            .iter()
            .map(|p| type_args.get(p).cloned().unwrap_or(TypeExpr::Real))
            .collect()
    });
    let shown: Vec<String> = args.iter().map(|v| v.to_string()).collect();
    let inst = match &targs {
        Some(ts) => format!("[{}]", ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")),
        None => String::new(),
    };
    let command = format!("print {}{inst}({})", f.name, shown.join(", "));
    let outcome = with_big_stack(|| {
        let mut ctx = checker.context();
        ctx.call_function(f, args, targs, &f.loc)
    });
    Rerun::Ran { command, outcome }
}

/// The value a parameter pattern takes under `b`.
fn pattern_value(p: &Pattern, b: &Binding) -> Option<Value> {
    match p {
        Pattern::Ident(n) => b.get(n).cloned(),
        Pattern::Ignore => None,
        Pattern::Literal(l) => Some(literal_value(l)),
        Pattern::Tuple(ps) => ps.iter().map(|p| pattern_value(p, b)).collect::<Option<_>>().map(Value::Tuple),
        Pattern::Record(n, ps) => ps
            .iter()
            .map(|p| pattern_value(p, b))
            .collect::<Option<_>>()
            .map(|vs| Value::Record(n.clone(), vs)),
        Pattern::SeqEnum(ps) => ps.iter().map(|p| pattern_value(p, b)).collect::<Option<Vec<_>>>().map(Value::seq),
    }
}
