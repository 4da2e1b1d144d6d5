//! Command-line entry point: an interactive session, or one batch `qc` run.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spec_qc::cli::{load_config, load_config_file, run_batch_mode, Session, ToolConfig, EXIT_LOAD_ERROR};

#[derive(Parser, Debug)]
#[command(name = "spec-qc", version, about = "Check proof obligations of a specification")]
struct Args {
    /// Run `qc` once with these arguments and exit.
    #[arg(long, value_name = "QC ARGS", allow_hyphen_values = true)]
    batch: Option<String>,
    /// Configuration file; by default quickcheck.json is looked up in the
    /// current directory.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Obligations checked at once.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Specification files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

fn config(args: &Args) -> Result<ToolConfig, String> {
    let loaded = match &args.config {
        Some(p) => load_config_file(p),
        None => load_config(&std::env::current_dir().map_err(|e| e.to_string())?),
    };
    loaded.map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_LOAD_ERROR as u8);
        }
    };
    if let Some(qc) = &args.batch {
        let (text, code) = run_batch_mode(&args.files, qc, config);
        print!("{text}");
        return ExitCode::from(code as u8);
    }
    let mut session = match Session::load(&args.files, config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_LOAD_ERROR as u8);
        }
    };
    session.set_workers(args.workers);
    let interrupter = session.interrupter();
    if let Err(e) = ctrlc::set_handler(move || interrupter.interrupt()) {
        eprintln!("Warning: cannot handle interrupts: {e}");
    }
    for w in &session.module().warnings {
        eprintln!("{w}");
    }
    let stdin = std::io::stdin();
    match session.run_repl(stdin.lock(), std::io::stdout()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
