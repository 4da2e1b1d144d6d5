//! Evaluation errors.

use std::fmt;

use thiserror::Error;

use crate::lang::Location;

/// Runtime error codes.
pub mod codes {
    pub const CASES_NO_MATCH: u32 = 4004;
    pub const HEAD_OF_EMPTY: u32 = 4010;
    pub const DINTER_OF_EMPTY: u32 = 4011;
    pub const TYPE_MISMATCH: u32 = 4020;
    pub const MUNION_CLASH: u32 = 4030;
    pub const TAIL_OF_EMPTY: u32 = 4033;
    pub const PATTERN_MISMATCH: u32 = 4035;
    pub const LET_BE_NO_MATCH: u32 = 4045;
    pub const PRECONDITION: u32 = 4055;
    pub const POSTCONDITION: u32 = 4056;
    pub const NOT_IN_TYPE: u32 = 4060;
    pub const MAP_KEY: u32 = 4061;
    pub const SEQ_INDEX_NOT_NAT1: u32 = 4064;
    pub const SEQ_INDEX_RANGE: u32 = 4083;
    pub const DIVISION_BY_ZERO: u32 = 4134;
    pub const RECURSION_LIMIT: u32 = 4174;
    pub const INFINITE_BIND: u32 = 4200;
    pub const STATE_UNAVAILABLE: u32 = 4201;
    pub const TOO_LARGE: u32 = 4202;
}

/// A runtime error raised by a partial operator or a failed check.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("Error {code}: {message} in {loc}")]
pub struct RuntimeError {
    pub code: u32,
    pub message: String,
    pub loc: Location,
}

impl RuntimeError {
    pub fn new(code: u32, message: impl Into<String>, loc: &Location) -> Self {
        RuntimeError {
            code,
            message: message.into(),
            loc: loc.clone(),
        }
    }

    /// False for errors that reflect a limit of the checker rather than a
    /// fault in the specification: unbounded binds, missing state, recursion
    /// depth and size limits.
    pub fn is_conclusive(&self) -> bool {
        !matches!(
            self.code,
            codes::INFINITE_BIND | codes::STATE_UNAVAILABLE | codes::RECURSION_LIMIT | codes::TOO_LARGE
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CancelReason {
    /// The wall-clock deadline passed.
    Timeout,
    /// The cancellation token was set from outside.
    Interrupted,
    /// The per-binding step budget ran out.
    StepBudget,
}

impl fmt::Display for CancelReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CancelReason::Timeout => "timeout",
            CancelReason::Interrupted => "interrupted",
            CancelReason::StepBudget => "step budget exhausted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error("evaluation cancelled: {0}")]
    Cancelled(CancelReason),
}

impl EvalError {
    pub fn runtime(code: u32, message: impl Into<String>, loc: &Location) -> Self {
        EvalError::Runtime(RuntimeError::new(code, message, loc))
    }
}

pub type EvalResult<T> = Result<T, EvalError>;
