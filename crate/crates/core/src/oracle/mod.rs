//! Ground-truth DQBF semantics.
//!
//! Everything here is deliberately naive: brute-force Skolem enumeration,
//! exhaustive autarky enumeration and direct tautology checks. The other
//! modules are tested against it, and the certificate checker relies on it.

mod autarky;
mod boolfunc;
mod enumerate;
mod solve;

use thiserror::Error;

use crate::model::Var;

pub use autarky::{
    apply_autarky, compose_autarkies, is_autarky, is_autarky_with, substituted_tautology,
    substituted_tautology_with, touched_clauses, Autarky, TautologyMethod, ENUM_CAP,
};
pub use boolfunc::{BoolFunc, TruthTable, TABLE_CAP};
pub use enumerate::{enumerate_autarkies, enumerate_autarkies_with};
pub use solve::{solve_bruteforce, OracleBudget, SkolemAssignment, SolveOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("function domain of {size} variables exceeds the table cap {cap}")]
    DomainTooLarge { size: usize, cap: usize },
    #[error("cube mentions variable {0} outside the function domain")]
    CubeOutsideDomain(Var),
    #[error("assignment is not an autarky: clause {clause} does not become a tautology")]
    NotAnAutarky { clause: usize },
    #[error("assignment violates the prefix at variable {0}")]
    PrefixViolation(Var),
    #[error("budget exceeded (estimated cost 2^{log2_cost:.1})")]
    BudgetExceeded { log2_cost: f64 },
}
