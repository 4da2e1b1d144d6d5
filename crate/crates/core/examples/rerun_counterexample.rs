//! Finds a counterexample for an unguarded sequence index and replays it
//! through the function, showing the runtime error the obligation guards.
//!
//! `cargo run --example rerun_counterexample`

use spec_qc::cli::{Session, ToolConfig};
use spec_qc::lang::{check_module, parse_specification};

const SPEC: &str = "functions
    itemAt: seq of nat * nat -> nat
    itemAt(list, index) == list(index)
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let module = check_module(parse_specification(SPEC, "test.vdmsl")?)?;
    let mut session = Session::new(module, ToolConfig::default());
    for command in ["pog", "qr 1", "qc", "qr 1"] {
        println!("> {command}");
        if let Some(text) = session.execute(command)? {
            print!("{text}");
        }
    }
    Ok(())
}
