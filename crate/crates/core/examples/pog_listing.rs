//! Parses a specification and lists its proof obligations.
//!
//! `cargo run --example pog_listing [file]`

use std::path::PathBuf;

use spec_qc::cli::load_files;
use spec_qc::pog::{generate_pos, render_pog};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let file = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/specs/specimen.vdmsl"));
    let module = load_files(&[file])?;
    print!("{}", render_pog(&generate_pos(&module)));
    Ok(())
}
