//! Random obligations over small finite types: every FAILED and PROVABLE
//! verdict must agree with exhaustive evaluation by an independent oracle.

mod common;

use common::{corpus, soundness_run, Env, V};

#[test]
fn verdicts_agree_with_exhaustive_evaluation() {
    for seed in [11, 12] {
        let r = soundness_run(seed, 300);
        assert_eq!(r.checked, 300);
        assert!(r.violations.is_empty(), "{:#?}", r.violations);
        assert!(r.failed > 0 && r.provable > 0, "{r:?}");
    }
}

#[test]
fn corpus_is_reproducible() {
    let a: Vec<String> = corpus(5, 20).iter().map(|c| c.source()).collect();
    let b: Vec<String> = corpus(5, 20).iter().map(|c| c.source()).collect();
    assert_eq!(a, b);
    assert_ne!(a, corpus(6, 20).iter().map(|c| c.source()).collect::<Vec<_>>());
}

#[test]
fn oracle_arithmetic() {
    use common::{BoolE, IntE};
    let env: Env = Default::default();
    let lit = |k| Box::new(IntE::Lit(k));
    let sub = |a, b| Box::new(IntE::Sub(a, b));
    // -7 div 2 = -3 and -7 mod 2 = 1
    let div = IntE::Div(sub(lit(0), lit(7)), lit(2));
    let modulo = IntE::Mod(sub(lit(0), lit(7)), lit(2));
    assert_eq!(BoolE::Eq(div, IntE::Sub(lit(0), lit(3))).eval(&env), Ok(true));
    assert_eq!(BoolE::Eq(modulo, IntE::Lit(1)).eval(&env), Ok(true));
    // 7 mod -2 = -1
    let neg = IntE::Mod(lit(7), sub(lit(0), lit(2)));
    assert_eq!(BoolE::Eq(neg, IntE::Sub(lit(0), lit(1))).eval(&env), Ok(true));
    assert!(BoolE::Eq(IntE::Div(lit(1), lit(0)), IntE::Lit(0)).eval(&env).is_err());
    // short-circuit guards the division
    let guarded = BoolE::Or(Box::new(BoolE::Lit(true)), Box::new(BoolE::Eq(IntE::Div(lit(1), lit(0)), IntE::Lit(0))));
    assert_eq!(guarded.eval(&env), Ok(true));
    let _ = V::Int(0);
}
