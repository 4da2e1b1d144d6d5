//! The random strategy: seeded pseudo-random values biased towards zero.

use std::time::{SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{parse_count, BindValues, Strategy, StrategyError, StrategyRequest, StrategyResult};
use crate::values::random_value;

pub const DEFAULT_RANDOM_SIZE: usize = 100;

#[derive(Clone, Debug)]
pub struct RandomStrategy {
    pub size: usize,
    /// Seed for repeatable runs; the clock is used when absent.
    pub seed: Option<u64>,
}

impl Default for RandomStrategy {
    fn default() -> Self {
        RandomStrategy {
            size: DEFAULT_RANDOM_SIZE,
            seed: None,
        }
    }
}

impl RandomStrategy {
    /// The generator for one obligation, derived from the seed and the
    /// obligation number so that checking order does not matter.
    pub fn generator(&self, po_number: usize) -> ChaCha8Rng {
        let seed = self.seed.unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0)
        });
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(po_number as u64);
        rng
    }
}

impl Strategy for RandomStrategy {
    fn name(&self) -> &'static str {
        "random"
    }

    fn options_usage(&self) -> &'static str {
        "[-random:size <size>][-random:seed <seed>]"
    }

    fn set_option(&mut self, key: &str, value: &str) -> Result<(), StrategyError> {
        match key {
            "size" => self.size = parse_count("random", key, value)?,
            "seed" => {
                self.seed = Some(value.trim().parse().map_err(|_| StrategyError::InvalidOption {
                    strategy: "random".into(),
                    key: key.into(),
                    expected: "an unsigned integer",
                    value: value.into(),
                })?)
            }
            _ => {
                return Err(StrategyError::UnknownOption {
                    strategy: "random".into(),
                    key: key.into(),
                })
            }
        }
        Ok(())
    }

    fn describe(&self) -> String {
        match self.seed {
            Some(s) => format!("random (size {}, seed {s})", self.size),
            None => format!("random (size {})", self.size),
        }
    }

    fn run(&self, req: &mut StrategyRequest<'_, '_>) -> StrategyResult {
        let mut rng = self.generator(req.po.number);
        let mut bindings = Vec::new();
        let mut diagnostics = Vec::new();
        for b in req.binds {
            let mut values = Vec::with_capacity(self.size);
            for k in 1..=self.size as u64 {
                match random_value(&b.ty, &mut rng, k, req.ctx.module, req.ctx) {
                    Some(v) => values.push(v),
                    None => {
                        diagnostics.push(format!("random: no value of {} satisfied its invariant", b.ty));
                        break;
                    }
                }
            }
            bindings.push(BindValues {
                name: b.name.clone(),
                ty: b.ty.clone(),
                values,
                complete: false,
            });
        }
        StrategyResult {
            bindings,
            has_all_values: false,
            verdict: None,
            diagnostics,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::TypeExpr;
    use crate::strategies::testing::{bind, module, pos, run_with, DIV};

    fn ints(s: &RandomStrategy) -> Vec<i64> {
        let m = module(DIV);
        let po = pos(&m).remove(0);
        let r = run_with(s, &m, &po, &[bind("i", TypeExpr::Int)]);
        assert!(!r.has_all_values);
        r.bindings[0]
            .values
            .iter()
            .map(|v| i64::try_from(v.as_int().unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn draws_widen_with_the_ordinal() {
        let s = RandomStrategy {
            size: 100,
            seed: Some(7),
        };
        let vs = ints(&s);
        assert_eq!(vs.len(), 100);
        for (k, v) in vs.iter().enumerate() {
            let bound = 10 * (k as i64 + 1);
            assert!((-bound..=bound).contains(v), "draw {} = {v}", k + 1);
        }
    }

    #[test]
    fn seeds_repeat() {
        let s = RandomStrategy {
            size: 20,
            seed: Some(42),
        };
        assert_eq!(ints(&s), ints(&s));
        let t = RandomStrategy {
            size: 20,
            seed: Some(43),
        };
        assert_ne!(ints(&s), ints(&t));
    }

    #[test]
    fn options_are_validated() {
        let mut s = RandomStrategy::default();
        s.set_option("seed", "9").unwrap();
        assert_eq!(s.seed, Some(9));
        assert!(s.set_option("seed", "x").is_err());
        assert!(matches!(
            s.set_option("colour", "1"),
            Err(StrategyError::UnknownOption { .. })
        ));
    }
}
