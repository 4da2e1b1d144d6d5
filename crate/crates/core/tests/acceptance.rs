//! Acceptance criteria. Each criterion prints one PASS or FAIL line; the
//! test fails if any criterion does.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{example, soundness_run, CorpusPo, Var};
use spec_qc::cli::{load_config_file, Session, ToolConfig};
use spec_qc::engine::{Checker, CheckedResult, RunSettings, Status};
use spec_qc::interp::{CancelToken, Context, Polarity};
use spec_qc::lang::TypeExpr;
use spec_qc::pog::{generate_pos, render_pog};
use spec_qc::strategies::{request_binds, RandomStrategy, Strategy, StrategyRequest};
use spec_qc::values::{enumerate_all, fixed_values, NoInvariants, Value};

struct Criteria {
    failures: Vec<String>,
}

impl Criteria {
    fn report(&mut self, name: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                self.failures.push(name.to_string());
            }
        }
    }
}

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn check_spec(spec: &str, settings: &RunSettings) -> Vec<CheckedResult> {
    let m = example(spec);
    let pos = generate_pos(&m);
    let checker = Checker::new(&m).unwrap();
    let refs: Vec<_> = pos.iter().collect();
    checker.run_batch(&refs, settings, &CancelToken::new(), &|_| {})
}

fn within(limit: Duration, f: impl FnOnce() -> Result<String, String>) -> Result<String, String> {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{detail} in {took:.2?}"))
}

fn item_at_reproduction() -> Result<String, String> {
    within(Duration::from_secs(1), || {
        let m = example("item_at.vdmsl");
        let pos = generate_pos(&m);
        let want = "Generated 1 proof obligation:\n\nProof Obligation 1: (Unproved)\n\
                    itemAt: sequence apply obligation in test.vdmsl at line 3:28\n\
                    (forall list:seq of nat, index:nat &\n  index in set inds list)\n";
        ensure(render_pog(&pos) == want, format!("listing was\n{}", render_pog(&pos)))?;
        let r = &check_spec("item_at.vdmsl", &RunSettings::default())[0];
        ensure(r.status == Status::Failed, format!("status {}", r.status))?;
        let cex = r.counterexample.clone().unwrap_or_default();
        let (Some(Value::Seq(list)), Some(Value::Int(index))) = (cex.get("list"), cex.get("index")) else {
            return Err(format!("counterexample {cex:?}"));
        };
        // index in set inds list holds only for 1 <= index <= len list
        let holds = *index >= 1.into() && *index <= list.len().into();
        ensure(!holds, "counterexample satisfies the body")?;
        ensure(list.is_empty() && *index == 0.into(), "expected index = 0, list = []")?;
        Ok("1 PO, FAILED with index = 0, list = []".into())
    })
}

fn maybe_and_trivial() -> Result<String, String> {
    let pre = within(Duration::from_secs(1), || {
        let r = &check_spec("item_at_pre.vdmsl", &RunSettings::default())[0];
        ensure(r.status == Status::Maybe, format!("precondition variant {}", r.status))?;
        Ok("MAYBE".into())
    })?;
    let guarded = within(Duration::from_secs(1), || {
        let r = &check_spec("item_at_if.vdmsl", &RunSettings::default())[0];
        match &r.status {
            Status::Provable(why) if why.starts_with("trivial") => Ok(format!("PROVABLE by {why}")),
            other => Err(format!("guarded variant {other}")),
        }
    })?;
    Ok(format!("{pre}; {guarded}"))
}

fn rerun_reproduction() -> Result<String, String> {
    let mut s = Session::new(example("item_at.vdmsl"), ToolConfig::default());
    s.qc(&[] as &[&str]).map_err(|e| e.to_string())?;
    let out = s.qr("1").map_err(|e| e.to_string())?;
    let first = out.lines().next().unwrap_or_default();
    ensure(first == "=> print itemAt([], 0)", format!("echo {first:?}"))?;
    let want = "Error 4064: Value 0 is not a nat1 in test.vdmsl at line 3:28";
    ensure(out.lines().nth(1) == Some(want), format!("output {out:?}"))?;
    Ok("error 4064 at 3:28".into())
}

fn polymorphic_reproduction() -> Result<String, String> {
    let real = &check_spec("polymorphic.vdmsl", &RunSettings::default())[0];
    ensure(real.status == Status::Failed, format!("default {}", real.status))?;
    ensure(real.type_args.get("T") == Some(&TypeExpr::Real), format!("{:?}", real.type_args))?;
    let ann = &check_spec("polymorphic_annotated.vdmsl", &RunSettings::default())[0];
    ensure(ann.status == Status::Failed, format!("annotated {}", ann.status))?;
    let t = ann.type_args.get("T").map(|t| t.explicit().to_string());
    ensure(t.as_deref() == Some("set of (nat)"), format!("annotated T = {t:?}"))?;
    let m = example("polymorphic_annotated.vdmsl");
    let text = spec_qc::engine::render_result(ann, &generate_pos(&m)[0]);
    ensure(text.contains("  T = set of (nat)\n"), text.clone())?;
    Ok("T = real; T = set of (nat)".into())
}

fn fixed_contract() -> Result<String, String> {
    let m = example("item_at.vdmsl");
    let got: BTreeSet<i64> = fixed_values(&TypeExpr::Int, 100, &m, &mut NoInvariants)
        .iter()
        .map(|v| match v {
            Value::Int(i) => i64::try_from(i).unwrap(),
            other => panic!("{other:?}"),
        })
        .collect();
    let want: BTreeSet<i64> = (-50..50).collect();
    ensure(got == want, format!("got {got:?}"))?;
    Ok("exactly -50..49".into())
}

fn finite_contract() -> Result<String, String> {
    within(Duration::from_secs(5), || {
        let m = example("item_at.vdmsl");
        let (bools, all) = enumerate_all(&TypeExpr::Set(Box::new(TypeExpr::Bool)), 1000, &m, &mut NoInvariants);
        ensure(all && bools.len() == 4, format!("set of bool gave {bools:?}"))?;

        let (cm, template) = common::corpus_template();
        let checker = Checker::new(&cm).unwrap();
        let body = common::BoolE::Le(
            common::IntE::Add(Box::new(common::IntE::Var(Var::N0)), Box::new(common::IntE::Var(Var::N1))),
            common::IntE::Add(Box::new(common::IntE::Lit(10)), Box::new(common::IntE::Card)),
        );
        let po = CorpusPo {
            vars: vec![Var::N0, Var::N1, Var::B0, Var::B1, Var::S0],
            body: common::BoolE::Or(Box::new(common::BoolE::Var(Var::B0)), Box::new(body)),
            polarity: Polarity::Universal,
        };
        let envs = po.assignments();
        ensure(envs.len() <= 10_000, format!("{} combinations", envs.len()))?;
        let r = checker
            .check_po(&po.obligation(&template, 1), &RunSettings::default(), &CancelToken::new())
            .unwrap();
        ensure(r.status == Status::Provable("finite types".into()), format!("status {}", r.status))?;
        let refuted = envs.iter().filter(|e| po.body.eval(e) != Ok(true)).count();
        ensure(refuted == 0, format!("{refuted} counterexamples by brute force"))?;
        Ok(format!("4 sets of bool; {} combinations PROVABLE by finite types", envs.len()))
    })
}

const UNBOUNDED: &str = "\
functions
  ratio: int * int -> int
  ratio(a, b) == a div (b - 7);

  pick: seq of int * nat -> int
  pick(s, i) == s(i)
  pre i > 2;
";

fn random_contract() -> Result<String, String> {
    let m = common::module(UNBOUNDED);
    let pos = generate_pos(&m);
    for seed in 0..10u64 {
        let seed_arg = seed.to_string();
        let args = ["-s", "random", "-random:seed", seed_arg.as_str()];
        let mut runs = Vec::new();
        for _ in 0..2 {
            let mut s = Session::new(common::module(UNBOUNDED), ToolConfig::default());
            let out = s.qc(&args).map_err(|e| e.to_string())?;
            let summary: Vec<_> = out.results.iter().map(|r| (r.status.clone(), r.counterexample.clone())).collect();
            runs.push(summary);
        }
        ensure(runs[0] == runs[1], format!("seed {seed}: {:?} vs {:?}", runs[0], runs[1]))?;

        let strategy = RandomStrategy {
            size: 100,
            seed: Some(seed),
        };
        let mut ctx = Context::new(&m).unwrap();
        let type_args = Default::default();
        let binds = request_binds(&pos[0], &type_args);
        let out = strategy.run(&mut StrategyRequest {
            po: &pos[0],
            binds: &binds,
            ctx: &mut ctx,
            type_args: &type_args,
        });
        for b in &out.bindings {
            if b.ty != TypeExpr::Int {
                continue;
            }
            ensure(b.values.len() == 100, format!("{} draws", b.values.len()))?;
            for (i, v) in b.values.iter().enumerate() {
                let k = i as i64 + 1;
                let Value::Int(x) = v else { return Err(format!("draw {v:?}")) };
                let x = i64::try_from(x).map_err(|e| e.to_string())?;
                ensure((-10 * k..=10 * k).contains(&x), format!("seed {seed}: draw {k} = {x}"))?;
            }
        }
    }
    Ok("10 seeds repeat; draws within [-10k, 10k]".into())
}

fn soundness() -> Result<String, String> {
    within(Duration::from_secs(60), || {
        let r = soundness_run(2024, 500);
        ensure(r.checked == 500, format!("{} checked", r.checked))?;
        ensure(r.violations.is_empty(), format!("{:#?}", r.violations))?;
        Ok(format!(
            "{} POs: {} FAILED, {} PROVABLE, {} other, none contradicted",
            r.checked, r.failed, r.provable, r.other
        ))
    })
}

fn timeout() -> Result<String, String> {
    let mut s = Session::new(example("timeout.vdmsl"), ToolConfig::default());
    let out = s.qc(&["-t", "1", "2"]).map_err(|e| e.to_string())?;
    let r = out.results.first().ok_or("no result")?;
    ensure(r.status == Status::Timeout, format!("status {}", r.status))?;
    ensure(r.elapsed <= Duration::from_millis(1500), format!("elapsed {:?}", r.elapsed))?;
    Ok(format!("TIMEOUT after {:.3?}", r.elapsed))
}

fn unchecked() -> Result<String, String> {
    let results = check_spec("counter.vdmsl", &RunSettings::default());
    let unchecked: Vec<_> = results.iter().filter(|r| r.status == Status::Unchecked).collect();
    ensure(!unchecked.is_empty(), "no UNCHECKED result")?;
    ensure(
        unchecked.iter().all(|r| r.elapsed.is_zero() && r.counterexample.is_none()),
        "an UNCHECKED obligation was evaluated",
    )?;
    Ok(format!("{} UNCHECKED", unchecked.len()))
}

fn config() -> Result<String, String> {
    let path = common::spec_path("quickcheck.json");
    let cfg = load_config_file(&path).map_err(|e| e.to_string())?;
    let mut s = Session::new(example("item_at.vdmsl"), cfg);
    let text = s.qc(&["-v"]).map_err(|e| e.to_string())?.text;
    let enabled: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "Enabled strategies:")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .map(str::trim)
        .collect();
    let disabled = text
        .lines()
        .find_map(|l| l.strip_prefix("Disabled strategies: "))
        .unwrap_or_default();
    ensure(text.contains("Timeout 10.0s\n"), "timeout is not 10s")?;
    ensure(enabled.contains(&"fixed (size 1000)"), format!("enabled {enabled:?}"))?;
    ensure(enabled.contains(&"trivial"), format!("enabled {enabled:?}"))?;
    let off: Vec<&str> = disabled.split(", ").collect();
    ensure(off.contains(&"direct") && off.contains(&"search"), format!("disabled {off:?}"))?;
    Ok("timeout 10, fixed size 1000, trivial on, direct and search off".into())
}

fn speed() -> Result<String, String> {
    let specs = [
        "specimen.vdmsl",
        "item_at.vdmsl",
        "item_at_pre.vdmsl",
        "item_at_if.vdmsl",
        "polymorphic.vdmsl",
    ];
    let mut times = Vec::new();
    for spec in specs {
        for r in check_spec(spec, &RunSettings::default()) {
            if r.status != Status::Timeout {
                times.push(r.elapsed);
            }
        }
    }
    ensure(times.len() <= 20, format!("{} POs", times.len()))?;
    let mean = times.iter().sum::<Duration>() / times.len() as u32;
    ensure(mean <= Duration::from_millis(100), format!("mean {mean:?}"))?;
    Ok(format!("{} POs, mean {mean:.2?}", times.len()))
}

#[test]
fn acceptance() {
    let mut c = Criteria { failures: Vec::new() };
    c.report("itemAt reproduction", item_at_reproduction());
    c.report("precondition MAYBE, guard trivial", maybe_and_trivial());
    c.report("qr reproduction", rerun_reproduction());
    c.report("type parameter binding", polymorphic_reproduction());
    c.report("fixed values", fixed_contract());
    c.report("finite enumeration", finite_contract());
    c.report("random reproducibility", random_contract());
    c.report("soundness corpus", soundness());
    c.report("timeout", timeout());
    c.report("unchecked", unchecked());
    c.report("configuration", config());
    c.report("speed", speed());
    assert!(c.failures.is_empty(), "failed: {:?}", c.failures);
}
