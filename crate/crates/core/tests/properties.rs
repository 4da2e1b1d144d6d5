//! Property tests for value generation, result rendering, argument parsing
//! and the consistency of verdicts across strategy selections.

mod common;

use std::time::Duration;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spec_qc::cli::{parse_qc_args, Selector};
use spec_qc::engine::{format_elapsed, Checker, CheckedResult, RunSettings, Status};
use spec_qc::interp::CancelToken;
use spec_qc::lang::TypeExpr;
use spec_qc::pog::generate_pos;
use spec_qc::strategies::StrategySet;
use spec_qc::values::{random_value, NoInvariants, Value};

const UNBOUNDED: &str = "\
functions
  ratio: int * int -> int
  ratio(a, b) == a div (b - 7);

  pick: seq of int * nat -> int
  pick(s, i) == s(i)
  pre i > 2;
";

fn seeded(seed: u64, names: &[&str]) -> RunSettings {
    let mut strategies = StrategySet::builtin();
    if !names.is_empty() {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        strategies.enable_only(&names).unwrap();
    }
    strategies.set_option("random", "seed", &seed.to_string()).unwrap();
    RunSettings {
        strategies,
        ..RunSettings::default()
    }
}

fn check_all(src: &str, settings: &RunSettings) -> Vec<CheckedResult> {
    let m = common::module(src);
    let pos = generate_pos(&m);
    let checker = Checker::new(&m).unwrap();
    pos.iter()
        .map(|po| checker.check_po(po, settings, &CancelToken::new()).unwrap())
        .collect()
}

fn outcome(r: &CheckedResult) -> (Status, Option<String>) {
    (r.status.clone(), r.counterexample.as_ref().map(|b| format!("{b:?}")))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elapsed_is_rounded_milliseconds(ms in 0u64..10_000_000) {
        let text = format_elapsed(Duration::from_millis(ms));
        let secs: f64 = text.parse().unwrap();
        prop_assert!((secs * 1000.0 - ms as f64).abs() < 0.5);
        let (_, frac) = text.split_once('.').unwrap();
        prop_assert!(frac == "0" || !frac.ends_with('0'));
    }

    #[test]
    fn integer_draws_stay_within_ten_times_the_ordinal(seed in any::<u64>()) {
        let m = common::module("functions\n  id: int -> int\n  id(x) == x;\n");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 1..=100u64 {
            let v = random_value(&TypeExpr::Int, &mut rng, k, &m, &mut NoInvariants).unwrap();
            let Value::Int(i) = v else { panic!("{v:?}") };
            let i = i64::try_from(&i).unwrap();
            let bound = 10 * k as i64;
            prop_assert!((-bound..=bound).contains(&i), "draw {} = {}", k, i);
        }
    }

    #[test]
    fn numbers_and_ranges_parse(a in 1usize..500, len in 0usize..500) {
        let b = a + len;
        let set = StrategySet::builtin();
        let q = parse_qc_args(&[a.to_string()], &set).unwrap();
        prop_assert_eq!(q.selection, vec![Selector::Number(a)]);
        let joined = parse_qc_args(&[format!("{a}-{b}")], &set).unwrap();
        let spaced = parse_qc_args(&[a.to_string(), "-".into(), b.to_string()], &set).unwrap();
        prop_assert_eq!(&joined.selection, &spaced.selection);
        prop_assert_eq!(joined.selection, vec![Selector::Range(a, b)]);
        if len > 0 {
            let reversed = format!("{b}-{a}");
            prop_assert!(parse_qc_args(&[reversed], &set).is_err());
        }
    }

    #[test]
    fn timeouts_parse_as_seconds(t in 1u32..10_000) {
        let q = parse_qc_args(&["-t".to_string(), t.to_string()], &StrategySet::builtin()).unwrap();
        prop_assert_eq!(q.timeout, Some(Duration::from_secs(t as u64)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn seeded_runs_repeat(seed in any::<u64>()) {
        let settings = seeded(seed, &[]);
        let a: Vec<_> = check_all(UNBOUNDED, &settings).iter().map(outcome).collect();
        let b: Vec<_> = check_all(UNBOUNDED, &settings).iter().map(outcome).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn strategy_subsets_never_contradict(seed in any::<u64>(), mask in 1u32..64) {
        let names = ["fixed", "random", "trivial", "finite", "search", "direct"];
        let chosen: Vec<&str> = names.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, n)| *n).collect();
        let (m, template) = common::corpus_template();
        let checker = Checker::new(&m).unwrap();
        let full = seeded(seed, &names);
        let part = seeded(seed, &chosen);
        for (i, c) in common::corpus(seed, 12).iter().enumerate() {
            let po = c.obligation(&template, i + 1);
            let x = checker.check_po(&po, &full, &CancelToken::new()).unwrap().status;
            let y = checker.check_po(&po, &part, &CancelToken::new()).unwrap().status;
            let clash = matches!((&x, &y), (Status::Failed, Status::Provable(_)) | (Status::Provable(_), Status::Failed));
            prop_assert!(!clash, "{}: {} vs {}", c.source(), x, y);
        }
    }
}
