//! Value generation: exhaustive enumeration, fixed deterministic sets and
//! seeded random draws.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use num_rational::BigRational;
use rand::Rng;

use super::bounds::integer_range;
use super::cardinality::{cardinality, CHAR_ALPHABET};
use super::membership::{type_membership, InvariantOracle};
use super::Value;
use crate::lang::{SpecModule, TypeBody, TypeExpr};

/// Attempts per random value before giving up on an invariant.
pub const RANDOM_RETRIES: usize = 100;

/// Beyond this nesting depth recursive types produce only their smallest
/// values.
const MAX_DEPTH: u32 = 8;

/// Every value of `t` satisfying its invariants, when the invariant-free
/// cardinality is at most `limit`. The flag reports whether enumeration
/// happened at all.
pub fn enumerate_all(
    t: &TypeExpr,
    limit: u64,
    module: &SpecModule,
    oracle: &mut dyn InvariantOracle,
) -> (Vec<Value>, bool) {
    if !cardinality(t, module).at_most(limit) {
        return (Vec::new(), false);
    }
    match enumerate_raw(t, module, limit as usize) {
        Some(values) => {
            let kept = values
                .into_iter()
                .filter(|v| type_membership(v, t, module, oracle))
                .collect();
            (kept, true)
        }
        None => (Vec::new(), false),
    }
}

/// All structural values of `t` (invariants ignored), ordered by size and
/// then lexicographically. `None` if infinite or larger than `limit`.
pub(crate) fn enumerate_raw(t: &TypeExpr, m: &SpecModule, limit: usize) -> Option<Vec<Value>> {
    raw(t, m, limit, &mut Vec::new())
}

fn raw(t: &TypeExpr, m: &SpecModule, limit: usize, visiting: &mut Vec<String>) -> Option<Vec<Value>> {
    let out = match t {
        TypeExpr::Bool => vec![Value::Bool(false), Value::Bool(true)],
        TypeExpr::Char => (0..CHAR_ALPHABET)
            .filter_map(char::from_u32)
            .map(Value::Char)
            .collect(),
        TypeExpr::Quote(q) => vec![Value::Quote(q.clone())],
        TypeExpr::Optional(inner) => {
            let mut out = vec![Value::Nil];
            for v in raw(inner, m, limit, visiting)? {
                if v != Value::Nil {
                    out.push(v);
                }
            }
            out
        }
        TypeExpr::Union(ts) => {
            let mut out = Vec::new();
            let mut seen = HashSet::new();
            for t in ts {
                for v in raw(t, m, limit, visiting)? {
                    if seen.insert(v.clone()) {
                        out.push(v);
                    }
                }
            }
            out
        }
        TypeExpr::Product(ts) => {
            let pools: Option<Vec<Vec<Value>>> = ts.iter().map(|t| raw(t, m, limit, visiting)).collect();
            cartesian(&pools?, limit)?.into_iter().map(Value::Tuple).collect()
        }
        TypeExpr::Set(e) => {
            let pool = raw(e, m, limit, visiting)?;
            if pool.len() >= usize::BITS as usize - 1 || (1usize << pool.len()) > limit {
                return None;
            }
            let mut out = Vec::new();
            for k in 0..=pool.len() {
                for_each_combination(pool.len(), k, &mut |idx| {
                    out.push(Value::set(idx.iter().map(|&i| pool[i].clone())));
                    true
                });
            }
            out
        }
        TypeExpr::Map(d, r) => {
            let dom = raw(d, m, limit, visiting)?;
            let rng = raw(r, m, limit, visiting)?;
            let mut total: usize = 1;
            for _ in 0..dom.len() {
                total = total.checked_mul(rng.len() + 1).filter(|t| *t <= limit)?;
            }
            let mut out = Vec::new();
            for k in 0..=dom.len() {
                for_each_combination(dom.len(), k, &mut |keys| {
                    for_each_tuple(rng.len(), k, &mut |vals| {
                        out.push(Value::Map(
                            keys.iter()
                                .zip(vals)
                                .map(|(&ki, &vi)| (dom[ki].clone(), rng[vi].clone()))
                                .collect(),
                        ));
                        true
                    });
                    true
                });
            }
            out
        }
        TypeExpr::Named(n) => {
            if visiting.contains(n) {
                return None;
            }
            if let Some((lo, hi)) = integer_range(t, m).and_then(|r| r.bounded()) {
                let n = (&hi - &lo + 1u32).to_usize().filter(|n| *n <= limit)?;
                return Some(
                    std::iter::successors(Some(lo), |i| Some(i + 1u32))
                        .take(n)
                        .map(Value::Int)
                        .collect(),
                );
            }
            visiting.push(n.clone());
            let r = match record_fields(m, n) {
                Some(fields) => {
                    let pools: Option<Vec<Vec<Value>>> =
                        fields.iter().map(|(_, t)| raw(t, m, limit, visiting)).collect();
                    pools
                        .and_then(|p| cartesian(&p, limit))
                        .map(|rows| rows.into_iter().map(|r| Value::Record(n.clone(), r)).collect())
                }
                None => match m.type_def(n).map(|d| &d.body) {
                    Some(TypeBody::Alias(t)) => raw(t, m, limit, visiting),
                    _ => None,
                },
            };
            visiting.pop();
            r?
        }
        TypeExpr::Nat
        | TypeExpr::Nat1
        | TypeExpr::Int
        | TypeExpr::Real
        | TypeExpr::Seq(_)
        | TypeExpr::TypeParam(_)
        | TypeExpr::Any => return None,
    };
    (out.len() <= limit).then_some(out)
}

fn record_fields<'m>(m: &'m SpecModule, name: &str) -> Option<&'m [(String, TypeExpr)]> {
    match m.type_def(name).map(|d| &d.body) {
        Some(TypeBody::Record(fields)) => Some(fields),
        Some(TypeBody::Alias(_)) => None,
        None => m.state.as_ref().filter(|s| s.name == name).map(|s| s.fields.as_slice()),
    }
}

fn cartesian(pools: &[Vec<Value>], limit: usize) -> Option<Vec<Vec<Value>>> {
    let mut total: usize = 1;
    for p in pools {
        total = total.checked_mul(p.len())?;
        if total > limit {
            return None;
        }
    }
    let mut out = Vec::with_capacity(total);
    let sizes: Vec<usize> = pools.iter().map(|p| p.len()).collect();
    for_each_index(&sizes, &mut |idx| {
        out.push(idx.iter().zip(pools).map(|(&i, p)| p[i].clone()).collect());
        true
    });
    Some(out)
}

/// Visits every index vector with `idx[i] < sizes[i]`, leftmost slowest.
/// Stops early when `visit` returns false; returns false in that case.
fn for_each_index(sizes: &[usize], visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if sizes.contains(&0) {
        return true;
    }
    let mut idx = vec![0usize; sizes.len()];
    loop {
        if !visit(&idx) {
            return false;
        }
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn for_each_tuple(base: usize, len: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if len == 0 {
        return visit(&[]);
    }
    for_each_index(&vec![base; len], visit)
}

/// Visits the `k`-subsets of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return true;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return false;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Integers in zero-centred order: 0, -1, 1, -2, 2, ...
fn centred(i: usize) -> i64 {
    let i = i as i64;
    if i % 2 == 1 {
        -(i + 1) / 2
    } else {
        i / 2
    }
}

fn char_order() -> Vec<char> {
    let mut out: Vec<char> = ('a'..='z').chain('A'..='Z').chain('0'..='9').collect();
    for c in (0..CHAR_ALPHABET).filter_map(char::from_u32) {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// A deterministic list of at most `size` values of `t`.
pub fn fixed_values(
    t: &TypeExpr,
    size: usize,
    module: &SpecModule,
    oracle: &mut dyn InvariantOracle,
) -> Vec<Value> {
    fixed(t, size, module, oracle, 0)
}

fn fixed(t: &TypeExpr, size: usize, m: &SpecModule, o: &mut dyn InvariantOracle, depth: u32) -> Vec<Value> {
    if size == 0 {
        return Vec::new();
    }
    let d = depth + 1;
    match t {
        TypeExpr::Bool => [false, true].into_iter().take(size).map(Value::Bool).collect(),
        TypeExpr::Nat => (0..size as i64).map(Value::int).collect(),
        TypeExpr::Nat1 => (1..=size as i64).map(Value::int).collect(),
        TypeExpr::Int => (0..size).map(|i| Value::int(centred(i))).collect(),
        TypeExpr::Real => {
            let mut out = Vec::with_capacity(size);
            let mut i = 0;
            while out.len() < size {
                let k = centred(i);
                out.push(Value::int(k));
                if k % 2 != 0 && out.len() < size {
                    out.push(Value::number(BigRational::new(BigInt::from(k), BigInt::from(2))));
                }
                i += 1;
            }
            out
        }
        TypeExpr::Char => char_order().into_iter().take(size).map(Value::Char).collect(),
        TypeExpr::Quote(q) => vec![Value::Quote(q.clone())],
        TypeExpr::TypeParam(_) | TypeExpr::Any => Vec::new(),
        TypeExpr::Optional(inner) => {
            let mut out = vec![Value::Nil];
            if depth < MAX_DEPTH {
                out.extend(fixed(inner, size - 1, m, o, d).into_iter().filter(|v| *v != Value::Nil));
            }
            out.truncate(size);
            out
        }
        TypeExpr::Union(ts) => {
            let lists: Vec<Vec<Value>> = ts.iter().map(|t| fixed(t, size, m, o, d)).collect();
            let mut out = Vec::new();
            let mut seen = HashSet::new();
            let longest = lists.iter().map(|l| l.len()).max().unwrap_or(0);
            'outer: for i in 0..longest {
                for l in &lists {
                    if let Some(v) = l.get(i) {
                        if seen.insert(v.clone()) {
                            out.push(v.clone());
                            if out.len() >= size {
                                break 'outer;
                            }
                        }
                    }
                }
            }
            out
        }
        TypeExpr::Seq(e) => {
            let pool = if depth < MAX_DEPTH { fixed(e, size, m, o, d) } else { Vec::new() };
            breadth_first(size, &mut |level, emit| {
                let b = level.min(pool.len());
                for len in 0..=level {
                    let go = for_each_tuple(b, len, &mut |idx| emit(Value::Seq(idx.iter().map(|&i| pool[i].clone()).collect())));
                    if !go {
                        return false;
                    }
                }
                true
            })
        }
        TypeExpr::Set(e) => {
            let pool = if depth < MAX_DEPTH { fixed(e, size, m, o, d) } else { Vec::new() };
            breadth_first(size, &mut |level, emit| {
                let b = level.min(pool.len());
                for k in 0..=level.min(b) {
                    let go = for_each_combination(b, k, &mut |idx| emit(Value::set(idx.iter().map(|&i| pool[i].clone()))));
                    if !go {
                        return false;
                    }
                }
                true
            })
        }
        TypeExpr::Map(kt, vt) => {
            let (keys, vals) = if depth < MAX_DEPTH {
                (fixed(kt, size, m, o, d), fixed(vt, size, m, o, d))
            } else {
                (Vec::new(), Vec::new())
            };
            breadth_first(size, &mut |level, emit| {
                let kb = level.min(keys.len());
                let vb = level.min(vals.len());
                for k in 0..=level.min(kb) {
                    let go = for_each_combination(kb, k, &mut |ks| {
                        for_each_tuple(vb, k, &mut |vs| {
                            emit(Value::Map(
                                ks.iter()
                                    .zip(vs)
                                    .map(|(&ki, &vi)| (keys[ki].clone(), vals[vi].clone()))
                                    .collect(),
                            ))
                        })
                    });
                    if !go {
                        return false;
                    }
                }
                true
            })
        }
        TypeExpr::Product(ts) => {
            let pools: Vec<Vec<Value>> = ts.iter().map(|t| fixed(t, size, m, o, d)).collect();
            fixed_rows(&pools, size).into_iter().map(Value::Tuple).collect()
        }
        TypeExpr::Named(n) => {
            if depth > MAX_DEPTH {
                return Vec::new();
            }
            let has_inv = m.type_def(n).is_some_and(|t| t.invariant.is_some());
            let want = if has_inv { size.saturating_mul(4) } else { size };
            let candidates = match record_fields(m, n) {
                Some(fields) => {
                    let pools: Vec<Vec<Value>> = fields.iter().map(|(_, t)| fixed(t, want, m, o, d)).collect();
                    fixed_rows(&pools, want)
                        .into_iter()
                        .map(|r| Value::Record(n.clone(), r))
                        .collect()
                }
                None => match m.type_def(n).map(|d| &d.body) {
                    Some(TypeBody::Alias(body)) => fixed(body, want, m, o, d),
                    _ => Vec::new(),
                },
            };
            let mut out: Vec<Value> = if has_inv {
                candidates
                    .into_iter()
                    .filter(|v| type_membership(v, t, m, o))
                    .collect()
            } else {
                candidates
            };
            out.truncate(size);
            out
        }
    }
}

fn fixed_rows(pools: &[Vec<Value>], size: usize) -> Vec<Vec<Value>> {
    let rows = breadth_first(size, &mut |level, emit| {
        let sizes: Vec<usize> = pools.iter().map(|p| level.min(p.len())).collect();
        for_each_index(&sizes, &mut |idx| emit(Value::Tuple(idx.iter().zip(pools).map(|(&i, p)| p[i].clone()).collect())))
    });
    rows.into_iter()
        .filter_map(|v| match v {
            Value::Tuple(vs) => Some(vs),
            _ => None,
        })
        .collect()
}

/// Produces the values of one level, passing each to the sink; false if
/// the sink stopped it.
type Level<'a> = dyn FnMut(usize, &mut dyn FnMut(Value) -> bool) -> bool + 'a;

/// Runs `level` for 0, 1, 2, ... collecting first-seen values until `size`
/// are found or two consecutive levels add nothing.
fn breadth_first(size: usize, level: &mut Level<'_>) -> Vec<Value> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut idle = 0;
    for d in 0..=size + 1 {
        let before = out.len();
        level(d, &mut |v| {
            if seen.insert(v.clone()) {
                out.push(v);
            }
            out.len() < size
        });
        if out.len() >= size {
            break;
        }
        if out.len() == before && d >= 2 {
            idle += 1;
            if idle >= 2 {
                break;
            }
        } else {
            idle = 0;
        }
    }
    out.truncate(size);
    out
}

/// The `ordinal`-th random value of `t` (ordinals start at 1). Integer draws
/// lie in `[-10k, 10k]` intersected with the type's range. `None` if an
/// invariant rejected [`RANDOM_RETRIES`] draws in a row.
pub fn random_value<R: Rng + ?Sized>(
    t: &TypeExpr,
    rng: &mut R,
    ordinal: u64,
    module: &SpecModule,
    oracle: &mut dyn InvariantOracle,
) -> Option<Value> {
    random(t, rng, ordinal.max(1), module, oracle, 0)
}

fn random<R: Rng + ?Sized>(
    t: &TypeExpr,
    rng: &mut R,
    k: u64,
    m: &SpecModule,
    o: &mut dyn InvariantOracle,
    depth: u32,
) -> Option<Value> {
    let bound = 10 * k as i64;
    let d = depth + 1;
    let max_len = if depth >= MAX_DEPTH { 0 } else { (k as usize).min(6) };
    Some(match t {
        TypeExpr::Bool => Value::Bool(rng.gen()),
        TypeExpr::Int => Value::int(rng.gen_range(-bound..=bound)),
        TypeExpr::Nat => Value::int(rng.gen_range(0..=bound)),
        TypeExpr::Nat1 => Value::int(rng.gen_range(1..=bound)),
        TypeExpr::Real => {
            let quarters = rng.gen_range(-4 * bound..=4 * bound);
            Value::number(BigRational::new(BigInt::from(quarters), BigInt::from(4)))
        }
        TypeExpr::Char => Value::Char(char::from(rng.gen_range(32u8..127))),
        TypeExpr::Quote(q) => Value::Quote(q.clone()),
        TypeExpr::TypeParam(_) | TypeExpr::Any => return None,
        TypeExpr::Optional(inner) => {
            if depth >= MAX_DEPTH || rng.gen_ratio(1, 5) {
                Value::Nil
            } else {
                random(inner, rng, k, m, o, d)?
            }
        }
        TypeExpr::Union(ts) => {
            let start = rng.gen_range(0..ts.len().max(1));
            (0..ts.len()).find_map(|i| random(&ts[(start + i) % ts.len()], rng, k, m, o, d))?
        }
        TypeExpr::Seq(e) => {
            let len = rng.gen_range(0..=max_len);
            Value::Seq((0..len).map(|_| random(e, rng, k, m, o, d)).collect::<Option<_>>()?)
        }
        TypeExpr::Set(e) => {
            let len = rng.gen_range(0..=max_len);
            Value::Set((0..len).map(|_| random(e, rng, k, m, o, d)).collect::<Option<_>>()?)
        }
        TypeExpr::Map(kt, vt) => {
            let len = rng.gen_range(0..=max_len);
            let mut entries = std::collections::BTreeMap::new();
            for _ in 0..len {
                let key = random(kt, rng, k, m, o, d)?;
                let val = random(vt, rng, k, m, o, d)?;
                entries.insert(key, val);
            }
            Value::Map(entries)
        }
        TypeExpr::Product(ts) => {
            Value::Tuple(ts.iter().map(|t| random(t, rng, k, m, o, d)).collect::<Option<_>>()?)
        }
        TypeExpr::Named(n) => {
            if depth > MAX_DEPTH {
                return None;
            }
            let has_inv = m.type_def(n).is_some_and(|t| t.invariant.is_some());
            for _ in 0..RANDOM_RETRIES {
                let candidate = match record_fields(m, n) {
                    Some(fields) => fields
                        .iter()
                        .map(|(_, t)| random(t, rng, k, m, o, d))
                        .collect::<Option<Vec<_>>>()
                        .map(|vs| Value::Record(n.clone(), vs)),
                    None => match m.type_def(n).map(|d| &d.body) {
                        Some(TypeBody::Alias(body)) => random(body, rng, k, m, o, d),
                        _ => return None,
                    },
                };
                match candidate {
                    Some(v) if !has_inv || type_membership(&v, t, m, o) => return Some(v),
                    _ => {}
                }
            }
            return None;
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_specification, parse_type};
    use crate::values::NoInvariants;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ty(s: &str) -> TypeExpr {
        parse_type(s).unwrap()
    }

    fn fixed_of(s: &str, n: usize) -> Vec<Value> {
        fixed_values(&ty(s), n, &SpecModule::default(), &mut NoInvariants)
    }

    #[test]
    fn invariant_ranges_are_enumerated() {
        let src = "types\n  T = nat1\n  inv t == t < 3;\n";
        let m = crate::lang::check_module(parse_specification(src, "t").unwrap()).unwrap();
        let mut ctx = crate::interp::Context::new(&m).unwrap();
        let (values, exhausted) = enumerate_all(&TypeExpr::Named("T".into()), 10, &m, &mut ctx);
        assert_eq!(values, [Value::int(1), Value::int(2)]);
        assert!(exhausted);
    }

    #[test]
    fn fixed_ints_are_centred() {
        let vs = fixed_of("int", 100);
        let got: std::collections::BTreeSet<Value> = vs.into_iter().collect();
        let want: std::collections::BTreeSet<Value> = (-50..=49).map(Value::int).collect();
        assert_eq!(got, want);
        assert_eq!(fixed_of("int", 3), vec![Value::int(0), Value::int(-1), Value::int(1)]);
        assert_eq!(fixed_of("nat1", 3), vec![Value::int(1), Value::int(2), Value::int(3)]);
    }

    #[test]
    fn fixed_reals_include_halves() {
        let vs = fixed_of("real", 4);
        assert_eq!(vs[0], Value::int(0));
        assert_eq!(vs[1], Value::int(-1));
        assert_eq!(vs[2], Value::number(BigRational::new((-1).into(), 2.into())));
    }

    #[test]
    fn fixed_compounds_are_distinct_and_small_first() {
        let vs = fixed_of("seq of bool", 5);
        assert_eq!(vs.len(), 5);
        assert_eq!(vs[0], Value::Seq(vec![]));
        let distinct: HashSet<_> = vs.iter().cloned().collect();
        assert_eq!(distinct.len(), 5);
        assert_eq!(fixed_of("set of bool", 100).len(), 4);
        assert_eq!(fixed_of("map bool to bool", 100).len(), 9);
        assert_eq!(fixed_of("bool * nat", 6).len(), 6);
    }

    #[test]
    fn fixed_is_prefix_stable() {
        for t in ["seq of int", "set of nat", "int * bool", "map nat to bool", "real | char"] {
            let small = fixed_of(t, 7);
            let large = fixed_of(t, 30);
            assert_eq!(small[..], large[..small.len()], "{t}");
        }
    }

    #[test]
    fn enumeration_order_and_invariants() {
        let m = SpecModule::default();
        let (vs, done) = enumerate_all(&ty("set of bool"), 1000, &m, &mut NoInvariants);
        assert!(done);
        assert_eq!(
            vs,
            vec![
                Value::set([]),
                Value::set([Value::Bool(false)]),
                Value::set([Value::Bool(true)]),
                Value::set([Value::Bool(false), Value::Bool(true)]),
            ]
        );
        assert_eq!(enumerate_all(&ty("nat"), 1000, &m, &mut NoInvariants), (vec![], false));
        assert_eq!(enumerate_all(&ty("set of char"), 1000, &m, &mut NoInvariants), (vec![], false));
    }

    #[test]
    fn random_ints_grow_with_ordinal() {
        let m = SpecModule::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 1..=100u64 {
            let v = random_value(&ty("int"), &mut rng, k, &m, &mut NoInvariants).unwrap();
            let i = v.as_int().unwrap().clone();
            assert!(i >= BigInt::from(-10 * k as i64) && i <= BigInt::from(10 * k as i64));
        }
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        let m = parse_specification("types\n  R :: a : nat b : seq of char;", "t").unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (1..20)
                .map(|k| random_value(&TypeExpr::Named("R".into()), &mut rng, k, &m, &mut NoInvariants).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(1), draw(1));
        assert_ne!(draw(1), draw(2));
    }
}
