//! An interactive session over one loaded specification.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use super::args::{parse_qc_args, usage_text, QcCommandLine, Verbosity};
use super::config::ToolConfig;
use super::CliError;
use crate::engine::{render_result, rerun_counterexample, CheckedResult, Checker, RunSettings, Status};
use crate::interp::{with_big_stack, CancelToken, EvalError};
use crate::lang::{check_module, parse_expression, parse_specification, SpecModule};
use crate::pog::{generate_pos, render_pog, ProofObligation};
use crate::strategies::fixed::fixed_create;

pub const HELP: &str = "\
pog                 - generate and list proof obligations
qc [<options>]      - check proof obligations (qc -? for options)
qr <PO#>            - run the function of a checked obligation
print <expr>        - evaluate an expression
default <module>    - set the current module
help                - list these commands
quit                - leave the session
";

/// Reads and checks specification files into one module.
pub fn load_files(files: &[PathBuf]) -> Result<SpecModule, CliError> {
    let mut module: Option<SpecModule> = None;
    let mut errors = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(f).map_err(|e| CliError::Load(format!("{}: {e}", f.display())))?;
        match parse_specification(&text, &f.display().to_string()) {
            Ok(m) => match &mut module {
                Some(all) => all.absorb(m),
                None => module = Some(m),
            },
            Err(e) => errors.push(e.to_string()),
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Load(errors.join("\n")));
    }
    let module = module.ok_or_else(|| CliError::Load("No specification files given".into()))?;
    check_module(module).map_err(|e| CliError::Load(e.to_string()))
}

/// Cancels the `qc` run in progress, if any.
#[derive(Clone, Debug, Default)]
pub struct Interrupter(Arc<Mutex<CancelToken>>);

impl Interrupter {
    pub fn interrupt(&self) {
        self.0.lock().expect("interrupter lock").cancel();
    }

    fn fresh(&self) -> CancelToken {
        let t = CancelToken::new();
        *self.0.lock().expect("interrupter lock") = t.clone();
        t
    }
}

/// What a `qc` command produced.
#[derive(Debug, Default)]
pub struct QcOutcome {
    pub text: String,
    pub results: Vec<CheckedResult>,
    /// False if the run was interrupted before every obligation finished.
    pub complete: bool,
}

pub struct Session {
    module: SpecModule,
    pos: Vec<ProofObligation>,
    results: BTreeMap<usize, CheckedResult>,
    config: ToolConfig,
    current: String,
    workers: usize,
    interrupter: Interrupter,
}

impl Session {
    pub fn new(module: SpecModule, config: ToolConfig) -> Self {
        let pos = generate_pos(&module);
        let current = module.name.clone();
        Session {
            module,
            pos,
            results: BTreeMap::new(),
            config,
            current,
            workers: 1,
            interrupter: Interrupter::default(),
        }
    }

    pub fn load(files: &[PathBuf], config: ToolConfig) -> Result<Self, CliError> {
        Ok(Session::new(load_files(files)?, config))
    }

    /// Obligations checked concurrently by `qc`.
    pub fn set_workers(&mut self, workers: usize) {
        self.workers = workers.max(1);
    }

    pub fn interrupter(&self) -> Interrupter {
        self.interrupter.clone()
    }

    pub fn module(&self) -> &SpecModule {
        &self.module
    }

    pub fn obligations(&self) -> &[ProofObligation] {
        &self.pos
    }

    pub fn pog(&self) -> String {
        render_pog(&self.pos)
    }

    /// Runs one command line. `Ok(None)` asks the session to end.
    pub fn execute(&mut self, line: &str) -> Result<Option<String>, CliError> {
        let line = line.trim();
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let out = match cmd {
            "" => String::new(),
            "pog" => self.pog(),
            "qc" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                self.qc(&toks)?.text
            }
            "qr" => self.qr(rest)?,
            "print" | "p" => self.print(rest)?,
            "default" => self.default_module(rest)?,
            "help" | "?" => HELP.to_string(),
            "quit" | "q" | "exit" => return Ok(None),
            other => return Err(CliError::Usage(format!("Unknown command {other}; type help for a list"))),
        };
        Ok(Some(out))
    }

    /// The effective settings: defaults, then the configuration file, then
    /// the command line.
    pub fn settings(&self, q: &QcCommandLine) -> Result<(RunSettings, Vec<String>), CliError> {
        let (mut strategies, warnings) = self.config.strategy_set();
        if !q.strategy_enables.is_empty() {
            strategies.enable_only(&q.strategy_enables)?;
        }
        for (s, k, v) in &q.strategy_options {
            if !(s == "fixed" && k == "create") {
                strategies.set_option(s, k, v)?;
            }
        }
        let settings = RunSettings {
            timeout: q.timeout.unwrap_or(self.config.timeout),
            strategies,
            workers: self.workers,
        };
        Ok((settings, warnings))
    }

    pub fn qc<S: AsRef<str>>(&mut self, tokens: &[S]) -> Result<QcOutcome, CliError> {
        let (defaults, _) = self.config.strategy_set();
        let q = parse_qc_args(tokens, &defaults)?;
        let (settings, warnings) = self.settings(&q)?;
        let mut text = String::new();
        if q.help {
            text = usage_text(&settings.strategies);
            return Ok(QcOutcome {
                text,
                complete: true,
                ..QcOutcome::default()
            });
        }
        let selected = q.select(&self.pos, &self.current);
        if let Some((_, _, file)) = q.strategy_options.iter().find(|(s, k, _)| s == "fixed" && k == "create") {
            let owned: Vec<ProofObligation> = selected.iter().map(|p| (*p).clone()).collect();
            let n = fixed_create(&owned, Path::new(file))?;
            return Ok(QcOutcome {
                text: format!("Wrote {n} bind entries to {file}\n"),
                complete: true,
                ..QcOutcome::default()
            });
        }
        for w in warnings.iter().chain(&self.config.warnings) {
            writeln!(text, "{w}").ok();
        }
        if q.verbosity == Verbosity::Verbose {
            text.push_str(&describe_settings(&settings, self.config.source.as_deref()));
        }
        let cancel = self.interrupter.fresh();
        let checker = Checker::new(&self.module).map_err(|e| CliError::Load(e.to_string()))?;
        let results = checker.run_batch(&selected, &settings, &cancel, &|_| {});
        drop(checker);
        for r in &results {
            if !q.shows(&r.status) {
                continue;
            }
            let po = &self.pos[r.number - 1];
            let rendered = render_result(r, po);
            match q.verbosity {
                Verbosity::Quiet => text.push_str(rendered.lines().next().unwrap_or_default()),
                _ => text.push_str(rendered.trim_end_matches('\n')),
            }
            text.push('\n');
            if q.verbosity == Verbosity::Verbose {
                if let (Some(m), false) = (&r.message, r.status == Status::Failed) {
                    writeln!(text, "  {m}").ok();
                }
                for d in &r.diagnostics {
                    writeln!(text, "  {d}").ok();
                }
            }
            if r.status == Status::Failed && q.verbosity != Verbosity::Quiet {
                text.push('\n');
            }
        }
        let complete = results.len() == selected.len();
        if !complete {
            writeln!(text, "Interrupted after {} of {} obligations", results.len(), selected.len()).ok();
        }
        if q.verbosity == Verbosity::Verbose {
            text.push_str(&summary(&results));
        }
        for r in &results {
            self.results.insert(r.number, r.clone());
        }
        Ok(QcOutcome {
            text,
            results,
            complete,
        })
    }

    pub fn qr(&self, arg: &str) -> Result<String, CliError> {
        let n: usize = arg
            .parse()
            .map_err(|_| CliError::Usage("Usage: qr <PO number>".into()))?;
        let po = self
            .pos
            .iter()
            .find(|p| p.number == n)
            .ok_or_else(|| CliError::Usage(format!("No such proof obligation: {n}")))?;
        let checker = Checker::new(&self.module).map_err(|e| CliError::Load(e.to_string()))?;
        let rerun = rerun_counterexample(&checker, po, self.results.get(&n));
        Ok(rerun.render(&self.module))
    }

    pub fn print(&self, src: &str) -> Result<String, CliError> {
        if src.is_empty() {
            return Err(CliError::Usage("Usage: print <expression>".into()));
        }
        let e = parse_expression(src, "console").map_err(|e| CliError::Usage(e.to_string()))?;
        let checker = Checker::new(&self.module).map_err(|e| CliError::Load(e.to_string()))?;
        let outcome = with_big_stack(|| checker.context().evaluate(&e));
        Ok(match outcome {
            Ok(v) => format!("= {v}\n"),
            Err(EvalError::Runtime(e)) => format!("{e}\n"),
            Err(e) => format!("{e}\n"),
        })
    }

    fn default_module(&mut self, name: &str) -> Result<String, CliError> {
        if name.is_empty() {
            return Ok(format!("Default module is {}\n", self.current));
        }
        if name != self.module.name {
            return Err(CliError::Usage(format!("Module {name} not found")));
        }
        self.current = name.to_string();
        Ok(format!("Default module set to {name}\n"))
    }

    /// Reads commands until `quit` or end of input, writing a `> ` prompt
    /// before each.
    pub fn run_repl(&mut self, input: impl BufRead, mut output: impl Write) -> std::io::Result<()> {
        let mut lines = input.lines();
        loop {
            write!(output, "> ")?;
            output.flush()?;
            let Some(line) = lines.next() else {
                writeln!(output)?;
                return Ok(());
            };
            match self.execute(&line?) {
                Ok(Some(text)) => write!(output, "{text}")?,
                Ok(None) => return Ok(()),
                Err(e) => writeln!(output, "{e}")?,
            }
        }
    }
}

fn describe_settings(settings: &RunSettings, source: Option<&Path>) -> String {
    let mut out = String::new();
    if let Some(p) = source {
        writeln!(out, "Configuration from {}", p.display()).ok();
    }
    writeln!(out, "Timeout {}s", crate::engine::format_elapsed(settings.timeout)).ok();
    writeln!(out, "Enabled strategies:").ok();
    for s in settings.strategies.enabled() {
        writeln!(out, "  {}", s.describe()).ok();
    }
    let disabled: Vec<&str> = settings
        .strategies
        .names()
        .into_iter()
        .filter(|n| !settings.strategies.is_enabled(n))
        .collect();
    if !disabled.is_empty() {
        writeln!(out, "Disabled strategies: {}", disabled.join(", ")).ok();
    }
    out
}

fn summary(results: &[CheckedResult]) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in results {
        *counts.entry(r.status.filter_name()).or_default() += 1;
    }
    let parts: Vec<String> = Status::FILTER_NAMES
        .iter()
        .filter_map(|n| counts.get(n).map(|c| format!("{c} {}", n.to_uppercase())))
        .collect();
    format!("Checked {} obligations: {}\n", results.len(), parts.join(", "))
}
