//! Pluggable value-selection strategies. Each one looks at an obligation
//! and its type binds and contributes candidate values, a completeness
//! claim, or a verdict of its own.

pub mod direct;
pub mod finite;
pub mod fixed;
pub mod random;
pub mod search;
pub mod trivial;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::interp::{Binding, Context};
use crate::lang::TypeExpr;
use crate::pog::ProofObligation;
use crate::values::Value;

pub use direct::{body_is_total, DirectStrategy};
pub use finite::FiniteStrategy;
pub use fixed::{fixed_create, BindFile, FixedStrategy};
pub use random::RandomStrategy;
pub use search::SearchStrategy;
pub use trivial::TrivialStrategy;

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("Unknown strategy {name}; valid strategies are {valid}")]
    UnknownStrategy { name: String, valid: String },
    #[error("Strategy {strategy} has no option {key}")]
    UnknownOption { strategy: String, key: String },
    #[error("Strategy {strategy} option {key} expects {expected}, got {value}")]
    InvalidOption {
        strategy: String,
        key: String,
        expected: &'static str,
        value: String,
    },
    #[error("{path}: {message}")]
    File { path: String, message: String },
}

/// One type bind to generate values for: the bound name, its type with
/// type parameters replaced, and its type as written in the obligation.
#[derive(Clone, Debug, PartialEq)]
pub struct RequestBind {
    pub name: String,
    pub ty: TypeExpr,
    pub declared: TypeExpr,
}

impl RequestBind {
    /// `name:type` as it appears in the obligation text.
    pub fn key(&self) -> String {
        format!("{}:{}", self.name, self.declared)
    }
}

pub struct StrategyRequest<'a, 'm> {
    pub po: &'a ProofObligation,
    pub binds: &'a [RequestBind],
    pub ctx: &'a mut Context<'m>,
    pub type_args: &'a BTreeMap<String, TypeExpr>,
}

/// Values proposed for one bind.
#[derive(Clone, Debug, PartialEq)]
pub struct BindValues {
    pub name: String,
    pub ty: TypeExpr,
    pub values: Vec<Value>,
    /// The list holds every value of the type.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Proved { reason: String, witness: Option<Binding> },
    Disproved { counterexample: Binding },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StrategyResult {
    pub bindings: Vec<BindValues>,
    /// Every bind of the request received all of its values.
    pub has_all_values: bool,
    pub verdict: Option<Verdict>,
    pub diagnostics: Vec<String>,
}

impl StrategyResult {
    pub fn proved(reason: impl Into<String>) -> Self {
        StrategyResult {
            verdict: Some(Verdict::Proved {
                reason: reason.into(),
                witness: None,
            }),
            ..Self::default()
        }
    }

    /// Adds values for a bind, setting `has_all_values` once every bind of
    /// `binds` is complete.
    fn with_bindings(bindings: Vec<BindValues>, binds: &[RequestBind]) -> Self {
        let has_all_values = !binds.is_empty()
            && binds
                .iter()
                .all(|b| bindings.iter().any(|v| v.name == b.name && v.ty == b.ty && v.complete));
        StrategyResult {
            bindings,
            has_all_values,
            ..Self::default()
        }
    }
}

pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Option synopsis for the usage listing, e.g. `[-finite:size <size>]`.
    fn options_usage(&self) -> &'static str {
        "(no options)"
    }

    fn set_option(&mut self, key: &str, value: &str) -> Result<(), StrategyError> {
        let _ = value;
        Err(StrategyError::UnknownOption {
            strategy: self.name().into(),
            key: key.into(),
        })
    }

    /// The current option values, for verbose output.
    fn describe(&self) -> String {
        self.name().to_string()
    }

    fn run(&self, req: &mut StrategyRequest<'_, '_>) -> StrategyResult;
}

pub(crate) fn parse_count(strategy: &str, key: &str, value: &str) -> Result<usize, StrategyError> {
    match value.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(StrategyError::InvalidOption {
            strategy: strategy.into(),
            key: key.into(),
            expected: "a positive integer",
            value: value.into(),
        }),
    }
}

/// Settings for one strategy from a configuration file or command line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StrategyConfig {
    pub name: String,
    pub enabled: Option<bool>,
    pub options: BTreeMap<String, String>,
}

/// The registered strategies and which of them are enabled.
pub struct StrategySet {
    entries: Vec<(Box<dyn Strategy>, bool)>,
}

impl Default for StrategySet {
    fn default() -> Self {
        StrategySet::builtin()
    }
}

impl StrategySet {
    /// The built-in strategies with default settings. All but `random` are
    /// enabled.
    pub fn builtin() -> Self {
        StrategySet {
            entries: vec![
                (Box::new(FixedStrategy::default()), true),
                (Box::new(SearchStrategy), true),
                (Box::new(FiniteStrategy::default()), true),
                (Box::new(TrivialStrategy), true),
                (Box::new(DirectStrategy), true),
                (Box::new(RandomStrategy::default()), false),
            ],
        }
    }

    /// Adds a user strategy, enabled or not.
    pub fn register(&mut self, strategy: Box<dyn Strategy>, enabled: bool) {
        self.entries.retain(|(s, _)| s.name() != strategy.name());
        self.entries.push((strategy, enabled));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(s, _)| s.name()).collect()
    }

    fn position(&self, name: &str) -> Result<usize, StrategyError> {
        self.entries
            .iter()
            .position(|(s, _)| s.name() == name)
            .ok_or_else(|| StrategyError::UnknownStrategy {
                name: name.into(),
                valid: self.names().join(", "),
            })
    }

    pub fn is_enabled(&self, name: &str) -> bool {
        self.entries.iter().any(|(s, e)| *e && s.name() == name)
    }

    pub fn set_enabled(&mut self, name: &str, enabled: bool) -> Result<(), StrategyError> {
        let i = self.position(name)?;
        self.entries[i].1 = enabled;
        Ok(())
    }

    /// Enables exactly the named strategies.
    pub fn enable_only(&mut self, names: &[String]) -> Result<(), StrategyError> {
        for n in names {
            self.position(n)?;
        }
        for (s, e) in &mut self.entries {
            *e = names.iter().any(|n| n == s.name());
        }
        Ok(())
    }

    pub fn set_option(&mut self, name: &str, key: &str, value: &str) -> Result<(), StrategyError> {
        let i = self.position(name)?;
        self.entries[i].0.set_option(key, value)
    }

    pub fn apply(&mut self, config: &StrategyConfig) -> Result<(), StrategyError> {
        if let Some(e) = config.enabled {
            self.set_enabled(&config.name, e)?;
        }
        for (k, v) in &config.options {
            self.set_option(&config.name, k, v)?;
        }
        Ok(())
    }

    pub fn enabled(&self) -> impl Iterator<Item = &dyn Strategy> {
        self.entries.iter().filter(|(_, e)| *e).map(|(s, _)| s.as_ref())
    }

    pub fn get(&self, name: &str) -> Option<&dyn Strategy> {
        self.entries.iter().find(|(s, _)| s.name() == name).map(|(s, _)| s.as_ref())
    }

    /// The strategy part of the `qc -?` listing.
    pub fn usage(&self) -> String {
        let mut out = String::from("Enabled strategies:\n");
        for (s, e) in &self.entries {
            if *e {
                out.push_str(&format!("  {} {}\n", s.name(), s.options_usage()));
            }
        }
        out.push_str("\nDisabled strategies (add with -s <name>):\n");
        for (s, e) in &self.entries {
            if !*e {
                out.push_str(&format!("  {} {}\n", s.name(), s.options_usage()));
            }
        }
        out
    }
}

impl fmt::Debug for StrategySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.entries.iter().map(|(s, e)| (s.describe(), *e)))
            .finish()
    }
}

/// The request binds of an obligation with no type parameters.
pub fn request_binds(po: &ProofObligation, type_args: &BTreeMap<String, TypeExpr>) -> Vec<RequestBind> {
    po.type_binds()
        .into_iter()
        .map(|(p, t)| RequestBind {
            name: p.to_string(),
            ty: t.substitute(&|n| type_args.get(n).cloned()),
            declared: t,
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use crate::lang::{check_module, parse_specification, SpecModule};
    use crate::pog::generate_pos;

    pub fn module(src: &str) -> SpecModule {
        check_module(parse_specification(src, "test.vdmsl").unwrap()).unwrap()
    }

    pub fn pos(m: &SpecModule) -> Vec<ProofObligation> {
        generate_pos(m)
    }

    pub fn bind(name: &str, ty: TypeExpr) -> RequestBind {
        RequestBind {
            name: name.into(),
            ty: ty.clone(),
            declared: ty,
        }
    }

    pub fn run_with(s: &dyn Strategy, m: &SpecModule, po: &ProofObligation, binds: &[RequestBind]) -> StrategyResult {
        let mut ctx = Context::new(m).unwrap();
        let type_args = BTreeMap::new();
        s.run(&mut StrategyRequest {
            po,
            binds,
            ctx: &mut ctx,
            type_args: &type_args,
        })
    }

    /// Runs `s` on the obligation numbered `n` of `m` with its own binds.
    pub fn run_po(s: &dyn Strategy, m: &SpecModule, n: usize) -> StrategyResult {
        let po = pos(m).remove(n - 1);
        let binds = request_binds(&po, &BTreeMap::new());
        run_with(s, m, &po, &binds)
    }

    pub const DIV: &str = "functions\n  f: int -> int\n  f(x) == 1 div x;\n";
}
