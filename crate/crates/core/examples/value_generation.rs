//! Shows the values the fixed, finite and random generators produce for a
//! few types.
//!
//! `cargo run --example value_generation`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spec_qc::lang::{parse_type, SpecModule};
use spec_qc::values::{enumerate_all, fixed_values, random_value, NoInvariants, Value};

fn show(label: &str, values: &[Value]) {
    let items: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    println!("{label}: [{}]", items.join(", "));
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = SpecModule::default();
    for t in ["int", "nat1", "seq of bool", "set of (<A> | <B>)", "map bool to bool"] {
        let ty = parse_type(t)?;
        show(&format!("fixed {t}"), &fixed_values(&ty, 8, &m, &mut NoInvariants));
    }
    let (all, complete) = enumerate_all(&parse_type("set of bool")?, 1000, &m, &mut NoInvariants);
    show(&format!("finite set of bool (complete {complete})"), &all);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let int = parse_type("int")?;
    let draws: Vec<Value> = (1..=10)
        .filter_map(|k| random_value(&int, &mut rng, k, &m, &mut NoInvariants))
        .collect();
    show("random int, draws 1..10", &draws);
    Ok(())
}
