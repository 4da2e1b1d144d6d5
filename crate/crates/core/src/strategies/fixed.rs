//! The fixed strategy: a deterministic set of values per type, optionally
//! replaced per bind by sets read from a bind file.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use super::{parse_count, BindValues, Strategy, StrategyError, StrategyRequest, StrategyResult};
use crate::interp::{Context, EvalError};
use crate::lang::{parse_bind_entry, Expr, TypeExpr};
use crate::pog::ProofObligation;
use crate::values::{cardinality, enumerate_all, fixed_values, type_membership, Value};

pub const DEFAULT_FIXED_SIZE: usize = 100;

/// One `name:type = set` line of a bind file.
#[derive(Clone, Debug, PartialEq)]
pub struct BindEntry {
    pub key: String,
    pub set: Expr,
    pub line: u32,
}

/// A parsed bind file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BindFile {
    pub path: String,
    pub entries: Vec<BindEntry>,
}

impl BindFile {
    pub fn load(path: &str) -> Result<Self, StrategyError> {
        let text = std::fs::read_to_string(path).map_err(|e| StrategyError::File {
            path: path.into(),
            message: e.to_string(),
        })?;
        Self::parse(&text, path)
    }

    /// Parses `<type bind> = <set expression>` lines; `--` comments and
    /// blank lines are skipped.
    pub fn parse(text: &str, path: &str) -> Result<Self, StrategyError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i as u32 + 1;
            let content = raw.split("--").next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (pattern, ty, set) = parse_bind_entry(content, path, line).map_err(|e| StrategyError::File {
                path: path.into(),
                message: format!("line {line}: {}", e.message),
            })?;
            entries.push(BindEntry {
                key: format!("{pattern}:{ty}"),
                set,
                line,
            });
        }
        Ok(BindFile {
            path: path.into(),
            entries,
        })
    }

    fn lookup(&self, keys: &[String]) -> Option<&BindEntry> {
        self.entries.iter().find(|e| keys.contains(&e.key))
    }
}

#[derive(Clone, Debug)]
pub struct FixedStrategy {
    pub size: usize,
    pub file: Option<BindFile>,
}

impl Default for FixedStrategy {
    fn default() -> Self {
        FixedStrategy {
            size: DEFAULT_FIXED_SIZE,
            file: None,
        }
    }
}

impl Strategy for FixedStrategy {
    fn name(&self) -> &'static str {
        "fixed"
    }

    fn options_usage(&self) -> &'static str {
        "[-fixed:file <file> |\n    -fixed:create <file>][-fixed:size <size>]"
    }

    fn set_option(&mut self, key: &str, value: &str) -> Result<(), StrategyError> {
        match key {
            "size" => self.size = parse_count("fixed", key, value)?,
            "file" => self.file = Some(BindFile::load(value)?),
            _ => {
                return Err(StrategyError::UnknownOption {
                    strategy: "fixed".into(),
                    key: key.into(),
                })
            }
        }
        Ok(())
    }

    fn describe(&self) -> String {
        match &self.file {
            Some(f) => format!("fixed (size {}, file {})", self.size, f.path),
            None => format!("fixed (size {})", self.size),
        }
    }

    fn run(&self, req: &mut StrategyRequest<'_, '_>) -> StrategyResult {
        let mut bindings = Vec::new();
        let mut diagnostics = Vec::new();
        for b in req.binds {
            let keys = [b.key(), format!("{}:{}", b.name, b.ty)];
            if let Some(entry) = self.file.as_ref().and_then(|f| f.lookup(&keys)) {
                match file_values(entry, &b.ty, req.ctx) {
                    Ok(values) => {
                        bindings.push(BindValues {
                            name: b.name.clone(),
                            ty: b.ty.clone(),
                            values,
                            complete: false,
                        });
                        continue;
                    }
                    Err(msg) => diagnostics.push(format!(
                        "fixed: bind file {} line {}: {msg}",
                        self.file.as_ref().map_or("", |f| f.path.as_str()),
                        entry.line
                    )),
                }
            }
            let values = fixed_values(&b.ty, self.size, req.ctx.module, req.ctx);
            let complete = covers_type(&values, &b.ty, self.size, req.ctx);
            bindings.push(BindValues {
                name: b.name.clone(),
                ty: b.ty.clone(),
                values,
                complete,
            });
        }
        let mut result = StrategyResult::with_bindings(bindings, req.binds);
        result.diagnostics = diagnostics;
        result
    }
}

fn file_values(entry: &BindEntry, ty: &TypeExpr, ctx: &mut Context<'_>) -> Result<Vec<Value>, String> {
    let value = ctx.evaluate(&entry.set).map_err(|e| match e {
        EvalError::Runtime(r) => r.to_string(),
        EvalError::Cancelled(c) => c.to_string(),
    })?;
    let Value::Set(items) = value else {
        return Err(format!("expected a set but found {value}"));
    };
    let m = ctx.module;
    Ok(items.into_iter().filter(|v| type_membership(v, ty, m, ctx)).collect())
}

/// True if `values` includes every value of the (finite) type.
fn covers_type(values: &[Value], ty: &TypeExpr, size: usize, ctx: &mut Context<'_>) -> bool {
    let m = ctx.module;
    if !cardinality(ty, m).at_most(size as u64) {
        return false;
    }
    let (all, enumerated) = enumerate_all(ty, size as u64, m, ctx);
    enumerated && all.iter().all(|v| values.contains(v))
}

/// Writes a bind file template with one commented line per distinct bind
/// of `pos`. The file appears only once fully written.
pub fn fixed_create(pos: &[ProofObligation], path: &Path) -> Result<usize, StrategyError> {
    let io_err = |e: std::io::Error| StrategyError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut seen = BTreeSet::new();
    let mut keys = Vec::new();
    for po in pos {
        for (p, t) in po.type_binds() {
            let key = format!("{p}:{t}");
            if seen.insert(key.clone()) {
                keys.push(key);
            }
        }
    }
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    writeln!(tmp, "-- Bind values for the fixed strategy, one per line:").map_err(io_err)?;
    writeln!(tmp, "-- <name>:<type> = <set expression>").map_err(io_err)?;
    for k in &keys {
        writeln!(tmp, "-- {k} = {{ }}").map_err(io_err)?;
    }
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(keys.len())
}
