//! The `qc` option grammar.

use std::time::Duration;

use glob::Pattern as Glob;

use super::CliError;
use crate::engine::Status;
use crate::pog::ProofObligation;
use crate::strategies::StrategySet;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Verbosity {
    Quiet,
    #[default]
    Normal,
    Verbose,
}

/// One element of a PO selection.
#[derive(Clone, Debug, PartialEq)]
pub enum Selector {
    Number(usize),
    Range(usize, usize),
    /// Matched against owner names and the module name.
    Pattern(String),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QcCommandLine {
    pub help: bool,
    pub verbosity: Verbosity,
    pub timeout: Option<Duration>,
    /// Lower-case status names given with `-i`.
    pub status_filters: Vec<String>,
    /// Strategies named with `-s`, in order.
    pub strategy_enables: Vec<String>,
    /// `(strategy, key, value)` from `-<strategy>:<key> <value>`.
    pub strategy_options: Vec<(String, String, String)>,
    pub selection: Vec<Selector>,
}

impl QcCommandLine {
    /// Whether a result with this status should be printed.
    pub fn shows(&self, status: &Status) -> bool {
        self.status_filters.is_empty() || self.status_filters.iter().any(|f| f == status.filter_name())
    }

    /// The obligations picked by the selection; all of them when it is
    /// empty.
    pub fn select<'p>(&self, pos: &'p [ProofObligation], module: &str) -> Vec<&'p ProofObligation> {
        if self.selection.is_empty() {
            return pos.iter().collect();
        }
        pos.iter()
            .filter(|po| {
                self.selection.iter().any(|s| match s {
                    Selector::Number(n) => po.number == *n,
                    Selector::Range(a, b) => (*a..=*b).contains(&po.number),
                    Selector::Pattern(p) => Glob::new(p).is_ok_and(|g| g.matches(&po.owner) || g.matches(module)),
                })
            })
            .collect()
    }
}

fn usage_error(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

/// Parses the tokens after `qc`. `strategies` supplies the valid names.
pub fn parse_qc_args<S: AsRef<str>>(tokens: &[S], strategies: &StrategySet) -> Result<QcCommandLine, CliError> {
    let names = strategies.names();
    let known = |n: &str| -> Result<(), CliError> {
        if names.contains(&n) {
            Ok(())
        } else {
            Err(usage_error(format!(
                "Unknown strategy {n}; valid strategies are {}",
                names.join(", ")
            )))
        }
    };
    let mut out = QcCommandLine::default();
    let mut toks = tokens.iter().map(|t| t.as_ref()).peekable();
    let mut quiet = false;
    let mut verbose = false;
    while let Some(tok) = toks.next() {
        let mut value = |flag: &str| -> Result<String, CliError> {
            toks.next()
                .map(str::to_string)
                .ok_or_else(|| usage_error(format!("{flag} needs an argument")))
        };
        match tok {
            "-?" | "-help" => out.help = true,
            "-q" => quiet = true,
            "-v" => verbose = true,
            "-t" => {
                let v = value(tok)?;
                match v.parse::<f64>() {
                    Ok(secs) if secs > 0.0 && secs.is_finite() => out.timeout = Some(Duration::from_secs_f64(secs)),
                    _ => return Err(usage_error(format!("-t expects a positive number of seconds, got {v}"))),
                }
            }
            "-i" => {
                let v = value(tok)?.to_lowercase();
                if !Status::FILTER_NAMES.contains(&v.as_str()) {
                    return Err(usage_error(format!(
                        "Unknown status {v}; valid statuses are {}",
                        Status::FILTER_NAMES.join(", ")
                    )));
                }
                out.status_filters.push(v);
            }
            "-s" => {
                let v = value(tok)?;
                known(&v)?;
                out.strategy_enables.push(v);
            }
            "-" => {
                let Some(Selector::Number(a)) = out.selection.pop() else {
                    return Err(usage_error("A range needs a number before -"));
                };
                let b = toks
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| usage_error("A range needs a number after -"))?;
                out.selection.push(range(a, b)?);
            }
            flag if flag.starts_with('-') && flag.len() > 1 => {
                let Some((strategy, key)) = flag[1..].split_once(':') else {
                    return Err(usage_error(format!("Unknown option {flag}")));
                };
                known(strategy)?;
                if key.is_empty() {
                    return Err(usage_error(format!("Malformed option {flag}")));
                }
                let v = value(flag)?;
                out.strategy_options.push((strategy.to_string(), key.to_string(), v));
            }
            other => out.selection.push(selector(other)?),
        }
    }
    if quiet && verbose {
        return Err(usage_error("-q and -v cannot be used together"));
    }
    out.verbosity = match (quiet, verbose) {
        (true, _) => Verbosity::Quiet,
        (_, true) => Verbosity::Verbose,
        _ => Verbosity::Normal,
    };
    Ok(out)
}

fn range(a: usize, b: usize) -> Result<Selector, CliError> {
    if a > b {
        return Err(usage_error(format!("Empty range {a} - {b}")));
    }
    Ok(Selector::Range(a, b))
}

fn selector(tok: &str) -> Result<Selector, CliError> {
    if let Ok(n) = tok.parse::<usize>() {
        return Ok(Selector::Number(n));
    }
    if let Some((a, b)) = tok.split_once('-') {
        if let (Ok(a), Ok(b)) = (a.parse::<usize>(), b.parse::<usize>()) {
            return range(a, b);
        }
    }
    Glob::new(tok).map_err(|e| usage_error(format!("Bad pattern {tok}: {e}")))?;
    Ok(Selector::Pattern(tok.to_string()))
}

/// The `qc -?` text for the given strategy set.
pub fn usage_text(strategies: &StrategySet) -> String {
    let mut out = String::from(
        "Usage: quickcheck [-?|-help][-q|-v][-t <secs>]\n  \
         [-i <status>]* [-s <strategy>]* [-<strategy:option>]*\n  \
         [<PO numbers/ranges/patterns>]\n\n  \
         -?|-help           - show command help\n  \
         -q|-v              - run with minimal or verbose output\n  \
         -t <secs>          - timeout in secs\n  \
         -i <status>        - only show this result status\n  \
         -s <strategy>      - enable this strategy (below)\n  \
         -<strategy:option> - pass option to strategy\n  \
         PO# numbers        - only process these POs\n  \
         PO# - PO#          - process a range of POs\n  \
         <pattern>          - process PO names or modules matching\n\n",
    );
    out.push_str(&strategies.usage());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<QcCommandLine, CliError> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        parse_qc_args(&toks, &StrategySet::builtin())
    }

    #[test]
    fn full_grammar() {
        let q = parse("-t 10 -s random -random:seed 42 1 - 5").unwrap();
        assert_eq!(q.timeout, Some(Duration::from_secs(10)));
        assert_eq!(q.strategy_enables, ["random"]);
        assert_eq!(q.strategy_options, [("random".into(), "seed".into(), "42".into())]);
        assert_eq!(q.selection, [Selector::Range(1, 5)]);
    }

    #[test]
    fn repeated_flags_and_patterns() {
        let q = parse("-i failed -i maybe -s fixed -s finite 3 7-9 item*").unwrap();
        assert_eq!(q.status_filters, ["failed", "maybe"]);
        assert_eq!(q.strategy_enables, ["fixed", "finite"]);
        assert_eq!(
            q.selection,
            [Selector::Number(3), Selector::Range(7, 9), Selector::Pattern("item*".into())]
        );
        assert!(q.shows(&Status::Failed));
        assert!(!q.shows(&Status::Provable("x".into())));
    }

    #[test]
    fn help_and_verbosity() {
        assert!(parse("-?").unwrap().help);
        assert!(parse("-help").unwrap().help);
        assert_eq!(parse("-q").unwrap().verbosity, Verbosity::Quiet);
        assert_eq!(parse("-v").unwrap().verbosity, Verbosity::Verbose);
        assert!(matches!(parse("-q -v"), Err(CliError::Usage(_))));
    }

    #[test]
    fn malformed_input_is_rejected() {
        for bad in ["-t", "-t zero", "-t -1", "-s magic", "-magic:size 3", "-x", "-i sometimes", "- 3", "5 - 2", "-fixed:size"] {
            assert!(matches!(parse(bad), Err(CliError::Usage(_))), "{bad}");
        }
        let Err(CliError::Usage(msg)) = parse("-s magic") else { unreachable!() };
        assert!(msg.contains("fixed, search, finite, trivial, direct, random"));
    }

    #[test]
    fn usage_lists_strategies() {
        let text = usage_text(&StrategySet::builtin());
        assert!(text.starts_with("Usage: quickcheck [-?|-help][-q|-v][-t <secs>]\n  [-i <status>]* [-s <strategy>]* [-<strategy:option>]*\n"));
        assert!(text.contains("  <pattern>          - process PO names or modules matching\n\nEnabled strategies:\n"));
        assert!(text.ends_with("Disabled strategies (add with -s <name>):\n  random [-random:size <size>][-random:seed <seed>]\n"));
    }
}
