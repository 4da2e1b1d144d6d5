//! The finite strategy: every value of each bind whose type is small
//! enough to enumerate.

use super::{parse_count, BindValues, Strategy, StrategyError, StrategyRequest, StrategyResult};
use crate::values::{cardinality, enumerate_all};

pub const DEFAULT_FINITE_SIZE: usize = 1000;

#[derive(Clone, Debug)]
pub struct FiniteStrategy {
    /// Largest type cardinality that is enumerated.
    pub size: usize,
}

impl Default for FiniteStrategy {
    fn default() -> Self {
        FiniteStrategy {
            size: DEFAULT_FINITE_SIZE,
        }
    }
}

impl Strategy for FiniteStrategy {
    fn name(&self) -> &'static str {
        "finite"
    }

    fn options_usage(&self) -> &'static str {
        "[-finite:size <size>]"
    }

    fn set_option(&mut self, key: &str, value: &str) -> Result<(), StrategyError> {
        match key {
            "size" => {
                self.size = parse_count("finite", key, value)?;
                Ok(())
            }
            _ => Err(StrategyError::UnknownOption {
                strategy: "finite".into(),
                key: key.into(),
            }),
        }
    }

    fn describe(&self) -> String {
        format!("finite (size {})", self.size)
    }

    fn run(&self, req: &mut StrategyRequest<'_, '_>) -> StrategyResult {
        let mut bindings = Vec::new();
        for b in req.binds {
            let m = req.ctx.module;
            if !cardinality(&b.ty, m).at_most(self.size as u64) {
                continue;
            }
            let (values, enumerated) = enumerate_all(&b.ty, self.size as u64, m, req.ctx);
            if enumerated {
                bindings.push(BindValues {
                    name: b.name.clone(),
                    ty: b.ty.clone(),
                    values,
                    complete: true,
                });
            }
        }
        StrategyResult::with_bindings(bindings, req.binds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_type, TypeExpr};
    use crate::strategies::testing::{bind, module, pos, run_with, DIV};

    fn run(binds: &[(&str, &str)]) -> StrategyResult {
        let m = module(DIV);
        let po = pos(&m).remove(0);
        let binds: Vec<_> = binds.iter().map(|(n, t)| bind(n, parse_type(t).unwrap())).collect();
        run_with(&FiniteStrategy::default(), &m, &po, &binds)
    }

    #[test]
    fn set_of_bool_has_four_values() {
        let r = run(&[("s", "set of bool")]);
        assert_eq!(r.bindings[0].values.len(), 4);
        assert!(r.has_all_values);
    }

    #[test]
    fn infinite_binds_are_left_alone() {
        let r = run(&[("n", "nat"), ("b", "bool")]);
        assert_eq!(r.bindings.len(), 1);
        assert_eq!(r.bindings[0].ty, TypeExpr::Bool);
        assert!(!r.has_all_values);
    }

    #[test]
    fn unions_with_quotes() {
        let r = run(&[("a", "bool"), ("b", "bool | <Q>")]);
        let sizes: Vec<usize> = r.bindings.iter().map(|b| b.values.len()).collect();
        assert_eq!(sizes, [2, 3]);
        assert!(r.has_all_values);
    }
}
