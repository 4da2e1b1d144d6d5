//! Evaluates quantified expressions with caller-supplied bind values, the
//! mechanism every strategy feeds.
//!
//! `cargo run --example quantifier_overrides`

use spec_qc::interp::{BindOverrides, Context};
use spec_qc::lang::{parse_expression, SpecModule, TypeExpr};
use spec_qc::values::Value;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = SpecModule::default();
    let mut ctx = Context::new(&m)?;

    let po = parse_expression("forall list:seq of nat, index:nat & index in set inds list", "demo")?;
    let mut overrides = BindOverrides::new();
    overrides.insert("list", TypeExpr::seq(TypeExpr::Nat), vec![Value::seq([]), Value::seq([Value::int(7)])], false);
    overrides.insert("index", TypeExpr::Nat, vec![Value::int(1), Value::int(0)], false);
    let report = ctx.evaluate_quantified(&po, overrides);
    println!("result {:?}, counterexample {:?}", report.result, report.failing);

    let exists = parse_expression("exists x:nat & x * x = 9", "demo")?;
    let mut overrides = BindOverrides::new();
    overrides.insert("x", TypeExpr::Nat, (0..10).map(Value::int).collect(), false);
    let report = ctx.evaluate_quantified(&exists, overrides);
    println!("result {:?}, witness {:?}", report.result, report.witness);
    Ok(())
}
