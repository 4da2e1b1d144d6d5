//! Helpers shared by the integration tests: loading specifications, masking
//! elapsed times, and a corpus of small obligations with a brute-force
//! oracle that does not use the crate's interpreter.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spec_qc::interp::{Binding, Polarity};
use spec_qc::lang::{check_module, parse_expression, parse_specification, SpecModule};
use spec_qc::pog::{generate_pos, ProofObligation};
use spec_qc::values::Value;

pub fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/specs").join(name)
}

/// Reads an example specification, naming it `test.vdmsl`.
pub fn example(name: &str) -> SpecModule {
    let text = std::fs::read_to_string(spec_path(name)).unwrap();
    module(&text)
}

pub fn module(src: &str) -> SpecModule {
    check_module(parse_specification(src, "test.vdmsl").unwrap()).unwrap()
}

/// Replaces each ` in <seconds>s` of result lines with ` in <t>s`.
pub fn mask_times(text: &str) -> String {
    text.split('\n').map(mask_line).collect::<Vec<_>>().join("\n")
}

fn mask_line(line: &str) -> String {
    if !line.contains("PO #") {
        return line.to_string();
    }
    let mut out = String::new();
    let mut rest = line;
    while let Some(at) = rest.find(" in ") {
        let after = &rest[at + 4..];
        let digits = after.chars().take_while(|c| c.is_ascii_digit() || *c == '.').count();
        if digits > 0 && after[digits..].starts_with('s') {
            out.push_str(&rest[..at]);
            out.push_str(" in <t>s");
            rest = &after[digits + 1..];
        } else {
            out.push_str(&rest[..at + 4]);
            rest = after;
        }
    }
    out.push_str(rest);
    out
}

/// The module every corpus obligation is checked in.
pub const CORPUS_MODULE: &str = "types\n  Small = nat\n  inv n == n <= 5;\n";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    N0,
    N1,
    B0,
    B1,
    S0,
}

impl Var {
    const ALL: [Var; 5] = [Var::N0, Var::N1, Var::B0, Var::B1, Var::S0];

    fn name(self) -> &'static str {
        match self {
            Var::N0 => "n0",
            Var::N1 => "n1",
            Var::B0 => "b0",
            Var::B1 => "b1",
            Var::S0 => "s0",
        }
    }

    fn type_name(self) -> &'static str {
        match self {
            Var::N0 | Var::N1 => "Small",
            Var::B0 | Var::B1 => "bool",
            Var::S0 => "set of Small",
        }
    }

    /// Every value of the variable's type.
    fn domain(self) -> Vec<V> {
        match self {
            Var::N0 | Var::N1 => (0..=5).map(V::Int).collect(),
            Var::B0 | Var::B1 => vec![V::Bool(false), V::Bool(true)],
            Var::S0 => (0..64).map(V::Set).collect(),
        }
    }
}

/// Oracle values: integers, booleans and subsets of 0..=5 as bit masks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum V {
    Int(i64),
    Bool(bool),
    Set(u64),
}

impl V {
    fn from_value(v: &Value) -> Option<V> {
        match v {
            Value::Bool(b) => Some(V::Bool(*b)),
            Value::Int(i) => i.to_string().parse().ok().map(V::Int),
            Value::Set(s) => {
                let mut mask = 0u64;
                for e in s {
                    let V::Int(i) = V::from_value(e)? else { return None };
                    if !(0..=5).contains(&i) {
                        return None;
                    }
                    mask |= 1 << i;
                }
                Some(V::Set(mask))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum IntE {
    Var(Var),
    Lit(i64),
    Add(Box<IntE>, Box<IntE>),
    Sub(Box<IntE>, Box<IntE>),
    Mul(Box<IntE>, Box<IntE>),
    Div(Box<IntE>, Box<IntE>),
    Mod(Box<IntE>, Box<IntE>),
    Card,
    If(Box<BoolE>, Box<IntE>, Box<IntE>),
}

#[derive(Clone, Debug)]
pub enum BoolE {
    Var(Var),
    Lit(bool),
    Lt(IntE, IntE),
    Le(IntE, IntE),
    Eq(IntE, IntE),
    Ne(IntE, IntE),
    InSet(IntE),
    Empty,
    Not(Box<BoolE>),
    And(Box<BoolE>, Box<BoolE>),
    Or(Box<BoolE>, Box<BoolE>),
    Implies(Box<BoolE>, Box<BoolE>),
}

impl IntE {
    fn render(&self) -> String {
        match self {
            IntE::Var(v) => v.name().into(),
            IntE::Lit(k) => k.to_string(),
            IntE::Add(a, b) => format!("({} + {})", a.render(), b.render()),
            IntE::Sub(a, b) => format!("({} - {})", a.render(), b.render()),
            IntE::Mul(a, b) => format!("({} * {})", a.render(), b.render()),
            IntE::Div(a, b) => format!("({} div {})", a.render(), b.render()),
            IntE::Mod(a, b) => format!("({} mod {})", a.render(), b.render()),
            IntE::Card => "(card s0)".into(),
            IntE::If(c, a, b) => format!("(if {} then {} else {})", c.render(), a.render(), b.render()),
        }
    }

    fn eval(&self, env: &Env) -> Result<i64, ()> {
        Ok(match self {
            IntE::Var(v) => match env[v] {
                V::Int(i) => i,
                _ => return Err(()),
            },
            IntE::Lit(k) => *k,
            IntE::Add(a, b) => a.eval(env)? + b.eval(env)?,
            IntE::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            IntE::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            IntE::Div(a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                if y == 0 {
                    return Err(());
                }
                x / y
            }
            IntE::Mod(a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                if y == 0 {
                    return Err(());
                }
                x.rem_euclid(y) + if y < 0 && x.rem_euclid(y) != 0 { y } else { 0 }
            }
            IntE::Card => match env[&Var::S0] {
                V::Set(m) => m.count_ones() as i64,
                _ => return Err(()),
            },
            IntE::If(c, a, b) => {
                if c.eval(env)? {
                    a.eval(env)?
                } else {
                    b.eval(env)?
                }
            }
        })
    }

    fn vars(&self, out: &mut Vec<Var>) {
        match self {
            IntE::Var(v) => out.push(*v),
            IntE::Lit(_) => {}
            IntE::Card => out.push(Var::S0),
            IntE::Add(a, b) | IntE::Sub(a, b) | IntE::Mul(a, b) | IntE::Div(a, b) | IntE::Mod(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            IntE::If(c, a, b) => {
                c.vars(out);
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

impl BoolE {
    pub fn render(&self) -> String {
        match self {
            BoolE::Var(v) => v.name().into(),
            BoolE::Lit(b) => b.to_string(),
            BoolE::Lt(a, b) => format!("({} < {})", a.render(), b.render()),
            BoolE::Le(a, b) => format!("({} <= {})", a.render(), b.render()),
            BoolE::Eq(a, b) => format!("({} = {})", a.render(), b.render()),
            BoolE::Ne(a, b) => format!("({} <> {})", a.render(), b.render()),
            BoolE::InSet(a) => format!("({} in set s0)", a.render()),
            BoolE::Empty => "(s0 = {})".into(),
            BoolE::Not(p) => format!("(not {})", p.render()),
            BoolE::And(p, q) => format!("({} and {})", p.render(), q.render()),
            BoolE::Or(p, q) => format!("({} or {})", p.render(), q.render()),
            BoolE::Implies(p, q) => format!("({} => {})", p.render(), q.render()),
        }
    }

    /// Left-to-right evaluation with short-circuit connectives; `Err` for
    /// a division by zero.
    pub fn eval(&self, env: &Env) -> Result<bool, ()> {
        Ok(match self {
            BoolE::Var(v) => match env[v] {
                V::Bool(b) => b,
                _ => return Err(()),
            },
            BoolE::Lit(b) => *b,
            BoolE::Lt(a, b) => a.eval(env)? < b.eval(env)?,
            BoolE::Le(a, b) => a.eval(env)? <= b.eval(env)?,
            BoolE::Eq(a, b) => a.eval(env)? == b.eval(env)?,
            BoolE::Ne(a, b) => a.eval(env)? != b.eval(env)?,
            BoolE::InSet(a) => {
                let i = a.eval(env)?;
                match env[&Var::S0] {
                    V::Set(m) => (0..=5).contains(&i) && m & (1 << i) != 0,
                    _ => return Err(()),
                }
            }
            BoolE::Empty => env[&Var::S0] == V::Set(0),
            BoolE::Not(p) => !p.eval(env)?,
            BoolE::And(p, q) => p.eval(env)? && q.eval(env)?,
            BoolE::Or(p, q) => p.eval(env)? || q.eval(env)?,
            BoolE::Implies(p, q) => !p.eval(env)? || q.eval(env)?,
        })
    }

    fn vars(&self, out: &mut Vec<Var>) {
        match self {
            BoolE::Var(v) => out.push(*v),
            BoolE::Lit(_) => {}
            BoolE::Empty => out.push(Var::S0),
            BoolE::Lt(a, b) | BoolE::Le(a, b) | BoolE::Eq(a, b) | BoolE::Ne(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            BoolE::InSet(a) => {
                a.vars(out);
                out.push(Var::S0);
            }
            BoolE::Not(p) => p.vars(out),
            BoolE::And(p, q) | BoolE::Or(p, q) | BoolE::Implies(p, q) => {
                p.vars(out);
                q.vars(out);
            }
        }
    }
}

pub type Env = BTreeMap<Var, V>;

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn int(&mut self, depth: u32) -> IntE {
        let leaf = depth == 0 || self.rng.gen_bool(0.35);
        if leaf {
            return match self.rng.gen_range(0..4) {
                0 => IntE::Var(Var::N0),
                1 => IntE::Var(Var::N1),
                2 => IntE::Card,
                _ => IntE::Lit(self.rng.gen_range(0..7)),
            };
        }
        let d = depth - 1;
        let (a, b) = (Box::new(self.int(d)), Box::new(self.int(d)));
        match self.rng.gen_range(0..7) {
            0 => IntE::Add(a, b),
            1 => IntE::Sub(a, b),
            2 => IntE::Mul(a, b),
            3 => IntE::Div(a, b),
            4 => IntE::Mod(a, b),
            5 => IntE::If(Box::new(self.boolean(d)), a, b),
            _ => IntE::Add(a, b),
        }
    }

    fn boolean(&mut self, depth: u32) -> BoolE {
        let leaf = depth == 0 || self.rng.gen_bool(0.25);
        if leaf {
            return match self.rng.gen_range(0..6) {
                0 => BoolE::Var(Var::B0),
                1 => BoolE::Var(Var::B1),
                2 => BoolE::Empty,
                3 => BoolE::Lit(self.rng.gen_bool(0.5)),
                4 => BoolE::InSet(IntE::Var(Var::N0)),
                _ => BoolE::Le(IntE::Var(Var::N0), IntE::Var(Var::N1)),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..10) {
            0 => BoolE::Lt(self.int(d), self.int(d)),
            1 => BoolE::Le(self.int(d), self.int(d)),
            2 => BoolE::Eq(self.int(d), self.int(d)),
            3 => BoolE::Ne(self.int(d), self.int(d)),
            4 => BoolE::InSet(self.int(d)),
            5 => BoolE::Not(Box::new(self.boolean(d))),
            6 => BoolE::And(Box::new(self.boolean(d)), Box::new(self.boolean(d))),
            7 => BoolE::Or(Box::new(self.boolean(d)), Box::new(self.boolean(d))),
            _ => BoolE::Implies(Box::new(self.boolean(d)), Box::new(self.boolean(d))),
        }
    }

    /// `A1 and A2 => A2`-shaped bodies, the kind the trivial strategy
    /// recognises.
    fn guarded(&mut self) -> BoolE {
        let a = self.boolean(1);
        let b = self.boolean(1);
        let conclusion = if self.rng.gen_bool(0.7) { b.clone() } else { self.boolean(1) };
        BoolE::Implies(Box::new(BoolE::And(Box::new(a), Box::new(b))), Box::new(conclusion))
    }
}

/// One generated obligation: its body over the variables in `vars`.
#[derive(Clone, Debug)]
pub struct CorpusPo {
    pub vars: Vec<Var>,
    pub body: BoolE,
    pub polarity: Polarity,
}

impl CorpusPo {
    pub fn source(&self) -> String {
        let q = if self.polarity == Polarity::Universal { "forall" } else { "exists" };
        let binds: Vec<String> = self.vars.iter().map(|v| format!("{}:{}", v.name(), v.type_name())).collect();
        format!("({q} {} &\n  {})", binds.join(", "), self.body.render())
    }

    /// Every assignment of the variables, in no particular order.
    pub fn assignments(&self) -> Vec<Env> {
        let mut out = vec![Env::new()];
        for v in &self.vars {
            out = out
                .into_iter()
                .flat_map(|env| {
                    v.domain().into_iter().map(move |x| {
                        let mut e = env.clone();
                        e.insert(*v, x);
                        e
                    })
                })
                .collect();
        }
        out
    }

    /// The oracle environment for a binding reported by the checker.
    pub fn env_of(&self, b: &Binding) -> Option<Env> {
        self.vars
            .iter()
            .map(|v| Some((*v, V::from_value(b.get(v.name())?)?)))
            .collect()
    }

    /// A proof obligation for the checker, built on `template`.
    pub fn obligation(&self, template: &ProofObligation, number: usize) -> ProofObligation {
        let mut po = template.clone();
        po.number = number;
        po.text = self.source();
        po.expr = parse_expression(&po.text, "corpus").unwrap();
        po.polarity = self.polarity;
        po.params.clear();
        po.type_params.clear();
        po.on_result = false;
        po.subject_type = None;
        po.executable = true;
        po
    }
}

/// `count` obligations generated from `seed`.
pub fn corpus(seed: u64, count: usize) -> Vec<CorpusPo> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    (0..count)
        .map(|_| {
            let body = if g.rng.gen_bool(0.2) { g.guarded() } else { g.boolean(3) };
            let mut vars = Vec::new();
            body.vars(&mut vars);
            let mut vars: Vec<Var> = Var::ALL.into_iter().filter(|v| vars.contains(v)).collect();
            if vars.is_empty() {
                vars.push(Var::B0);
            }
            let polarity = if g.rng.gen_bool(0.2) {
                Polarity::Existential
            } else {
                Polarity::Universal
            };
            CorpusPo { vars, body, polarity }
        })
        .collect()
}

/// A template obligation from the corpus module to build corpus POs on.
pub fn corpus_template() -> (SpecModule, ProofObligation) {
    let m = module(&format!("{CORPUS_MODULE}functions\n  f: seq of nat * nat -> nat\n  f(s, i) == s(i);\n"));
    let po = generate_pos(&m).remove(0);
    (m, po)
}

/// Outcome of checking a corpus against the oracle.
#[derive(Debug, Default)]
pub struct SoundnessReport {
    pub checked: usize,
    pub failed: usize,
    pub provable: usize,
    pub other: usize,
    /// Verdicts the oracle contradicts.
    pub violations: Vec<String>,
}

/// Checks `count` corpus obligations from `seed` and compares every
/// FAILED and PROVABLE verdict with brute-force evaluation.
pub fn soundness_run(seed: u64, count: usize) -> SoundnessReport {
    use spec_qc::engine::{Checker, RunSettings, Status};
    use spec_qc::interp::CancelToken;

    let (m, template) = corpus_template();
    let corpus = corpus(seed, count);
    let pos: Vec<ProofObligation> = corpus
        .iter()
        .enumerate()
        .map(|(i, c)| c.obligation(&template, i + 1))
        .collect();
    let refs: Vec<&ProofObligation> = pos.iter().collect();
    let settings = RunSettings {
        timeout: std::time::Duration::from_secs(5),
        workers: 4,
        ..RunSettings::default()
    };
    let checker = Checker::new(&m).unwrap();
    let results = checker.run_batch(&refs, &settings, &CancelToken::new(), &|_| {});
    let mut report = SoundnessReport::default();
    for r in results {
        report.checked += 1;
        let c = &corpus[r.number - 1];
        let universal = c.polarity == Polarity::Universal;
        let mut fail = |why: &str| report.violations.push(format!("{why}: {}", c.source()));
        match &r.status {
            Status::Failed => {
                report.failed += 1;
                let cex = r.counterexample.clone().unwrap_or_default();
                if universal {
                    match c.env_of(&cex) {
                        Some(env) if c.body.eval(&env) != Ok(true) => {}
                        _ => fail("counterexample does not falsify"),
                    }
                } else if c.assignments().iter().any(|env| c.body.eval(env) == Ok(true)) {
                    fail("a witness exists");
                }
            }
            Status::Provable(_) => {
                report.provable += 1;
                if universal {
                    if c.assignments().iter().any(|env| c.body.eval(env) != Ok(true)) {
                        fail("not a tautology");
                    }
                } else {
                    match r.witness.as_ref().and_then(|w| c.env_of(w)) {
                        Some(env) if c.body.eval(&env) == Ok(true) => {}
                        _ => fail("witness does not satisfy"),
                    }
                }
            }
            _ => report.other += 1,
        }
    }
    report
}
