//! Delta debugging of DQBF instances: clause-level ddmin followed by
//! structural shrinking (literals, dependencies, renumbering), each step
//! re-checked against an interestingness predicate.

mod interesting;
mod shrink;

use thiserror::Error;

pub use interesting::{Interestingness, InterestingnessSpec, SignalMatch};
pub use shrink::{
    ddmin_clauses, ddmin_pipeline, renumber_dense, shrink_structure, PassStats, ShrinkOptions,
    ShrinkResult,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DdminError {
    #[error("the input is not interesting to begin with")]
    NotInterestingInitially,
    #[error("no candidate, including the input, passed the final re-verification")]
    NotInterestingFinally,
    #[error("target tool failed: {0}")]
    ToolFailure(String),
    #[error("invalid interestingness predicate: {0}")]
    InvalidPredicate(String),
}
