//! The command-line front end: the `qc` option grammar, the configuration
//! file, the interactive session and batch runs.

pub mod args;
pub mod config;
pub mod session;

use std::path::PathBuf;

use thiserror::Error;

use crate::engine::Status;
use crate::strategies::StrategyError;

pub use args::{parse_qc_args, usage_text, QcCommandLine, Selector, Verbosity};
pub use config::{load_config, load_config_file, parse_config, ToolConfig};
pub use session::{load_files, Interrupter, QcOutcome, Session, HELP};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Load(String),
    #[error("Error in configuration {path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Exit status of a batch run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_LOAD_ERROR: i32 = 2;

/// The exit status for a set of results: failure if anything failed or
/// timed out.
pub fn exit_code(results: &[crate::engine::CheckedResult]) -> i32 {
    if results.iter().any(|r| matches!(r.status, Status::Failed | Status::Timeout)) {
        EXIT_FAILED
    } else {
        EXIT_OK
    }
}

/// Loads `files`, runs `qc` once with `qc_args` and returns the output and
/// exit status. Load and usage errors both give [`EXIT_LOAD_ERROR`].
pub fn run_batch_mode(files: &[PathBuf], qc_args: &str, config: ToolConfig) -> (String, i32) {
    let mut session = match Session::load(files, config) {
        Ok(s) => s,
        Err(e) => return (format!("{e}\n"), EXIT_LOAD_ERROR),
    };
    let toks: Vec<&str> = qc_args.split_whitespace().collect();
    match session.qc(&toks) {
        Ok(out) => {
            let code = exit_code(&out.results);
            (out.text, code)
        }
        Err(e) => (format!("{e}\n"), EXIT_LOAD_ERROR),
    }
}
