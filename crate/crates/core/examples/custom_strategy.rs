//! Plugs a user strategy into the checker. It proposes powers of two for
//! integer binds, which reaches a zero divisor the built-in strategies
//! miss with their default sizes.
//!
//! `cargo run --example custom_strategy`

use spec_qc::engine::{render_result, Checker, RunSettings};
use spec_qc::interp::CancelToken;
use spec_qc::lang::{check_module, parse_specification, TypeExpr};
use spec_qc::pog::generate_pos;
use spec_qc::strategies::{BindValues, Strategy, StrategyRequest, StrategyResult};
use spec_qc::values::Value;

const SPEC: &str = "functions
    scale: nat -> nat
    scale(n) == 1000 div (n - 4096);
";

struct PowersOfTwo;

impl Strategy for PowersOfTwo {
    fn name(&self) -> &'static str {
        "powers"
    }

    fn run(&self, req: &mut StrategyRequest<'_, '_>) -> StrategyResult {
        let bindings = req
            .binds
            .iter()
            .filter(|b| matches!(b.ty, TypeExpr::Nat | TypeExpr::Nat1 | TypeExpr::Int))
            .map(|b| BindValues {
                name: b.name.clone(),
                ty: b.ty.clone(),
                values: (0..16).map(|k| Value::int(1i64 << k)).collect(),
                complete: false,
            })
            .collect();
        StrategyResult {
            bindings,
            ..StrategyResult::default()
        }
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let module = check_module(parse_specification(SPEC, "scale.vdmsl")?)?;
    let pos = generate_pos(&module);
    let checker = Checker::new(&module)?;
    let mut settings = RunSettings::default();
    for enabled in [false, true] {
        settings.strategies.register(Box::new(PowersOfTwo), enabled);
        let r = checker
            .check_po(&pos[0], &settings, &CancelToken::new())
            .expect("not cancelled");
        println!("powers {}:", if enabled { "enabled" } else { "disabled" });
        print!("{}", render_result(&r, &pos[0]));
    }
    Ok(())
}
