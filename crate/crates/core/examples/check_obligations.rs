//! Checks every obligation of a specification with the default strategies
//! and prints one line per result, then a tally.
//!
//! `cargo run --example check_obligations [file]`

use std::collections::BTreeMap;
use std::path::PathBuf;

use spec_qc::cli::load_files;
use spec_qc::engine::{render_result, Checker, RunSettings};
use spec_qc::interp::CancelToken;
use spec_qc::pog::{generate_pos, ProofObligation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let file = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/specs/specimen.vdmsl"));
    let module = load_files(&[file])?;
    let pos = generate_pos(&module);
    let checker = Checker::new(&module)?;
    let selected: Vec<&ProofObligation> = pos.iter().collect();
    let settings = RunSettings {
        workers: 4,
        ..RunSettings::default()
    };
    let results = checker.run_batch(&selected, &settings, &CancelToken::new(), &|_| {});
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    for r in &results {
        print!("{}", render_result(r, &pos[r.number - 1]));
        *tally.entry(r.status.to_string()).or_default() += 1;
    }
    println!("{tally:?}");
    Ok(())
}
