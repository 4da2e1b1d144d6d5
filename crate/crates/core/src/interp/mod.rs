//! A tree-walking interpreter for checked expressions, with instrumented
//! quantifiers that take their bind values from outside.

pub mod call;
pub mod context;
pub mod error;
pub mod eval;
pub mod pattern;
pub mod quantified;

pub use context::{
    BindOverride, BindOverrides, CancelToken, Context, ENUMERATION_LIMIT, MAX_CALL_DEPTH, PRODUCT_CAP, STEP_BUDGET,
};
pub use error::{codes, CancelReason, EvalError, EvalResult, RuntimeError};
pub use pattern::{literal_value, match_pattern};
pub use quantified::{quantifier_chain, Binding, Polarity, QuantifierReport};

/// Stack size for threads that evaluate specifications. Deep recursion in
/// user functions needs far more than the default.
pub const EVAL_STACK_SIZE: usize = 256 << 20;

/// Runs `f` on a thread with [`EVAL_STACK_SIZE`] bytes of stack.
pub fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(EVAL_STACK_SIZE)
            .spawn_scoped(s, f)
            .expect("failed to spawn evaluation thread")
            .join()
            .unwrap_or_else(|p| std::panic::resume_unwind(p))
    })
}
