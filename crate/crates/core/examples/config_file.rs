//! Loads a quickcheck.json file and shows the settings it produces.
//!
//! `cargo run --example config_file [path]`

use std::path::PathBuf;

use spec_qc::cli::load_config_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/specs/quickcheck.json"));
    let config = load_config_file(&path)?;
    let (strategies, warnings) = config.strategy_set();
    for w in config.warnings.iter().chain(&warnings) {
        eprintln!("{w}");
    }
    println!("timeout {:?}", config.timeout);
    for name in strategies.names() {
        let s = strategies.get(name).expect("registered");
        let state = if strategies.is_enabled(name) { "enabled" } else { "disabled" };
        println!("{:<8} {state:<8} {}", name, s.describe());
    }
    Ok(())
}
