//! Propositional SAT backend used by the autarky encodings and by
//! tautology refutation: a built-in DPLL solver and an adapter for external
//! DIMACS solvers.

mod dpll;
mod external;

use std::fmt::Write as _;
use std::time::Duration;

use thiserror::Error;

pub use dpll::sat_solve;
pub use external::{parse_solver_output, sat_solve_external};

/// A CNF over variables `1..=n_vars`, literals as signed integers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfInstance {
    pub n_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfInstance {
    pub fn new() -> CnfInstance {
        CnfInstance::default()
    }

    pub fn new_var(&mut self) -> i32 {
        self.n_vars += 1;
        self.n_vars as i32
    }

    pub fn add_clause(&mut self, clause: impl IntoIterator<Item = i32>) {
        let c: Vec<i32> = clause.into_iter().collect();
        debug_assert!(c
            .iter()
            .all(|&l| l != 0 && l.unsigned_abs() <= self.n_vars));
        self.clauses.push(c);
    }

    /// Pairwise at-most-one plus at-least-one.
    pub fn add_exactly_one(&mut self, lits: &[i32]) {
        self.add_clause(lits.iter().copied());
        for (i, &a) in lits.iter().enumerate() {
            for &b in &lits[i + 1..] {
                self.add_clause([-a, -b]);
            }
        }
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.n_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{l} ");
            }
            s.push_str("0\n");
        }
        s
    }

    /// Whether `model` (indexed by variable, slot 0 unused) satisfies every
    /// clause; returns the first violated clause index otherwise.
    pub fn check_model(&self, model: &[bool]) -> Result<(), usize> {
        for (i, c) in self.clauses.iter().enumerate() {
            let sat = c.iter().any(|&l| {
                let v = model.get(l.unsigned_abs() as usize).copied().unwrap_or(false);
                v == (l > 0)
            });
            if !sat {
                return Err(i);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub status: SatStatus,
    /// Total assignment indexed by variable (slot 0 unused); present iff SAT.
    pub model: Option<Vec<bool>>,
}

impl SatResult {
    pub fn unsat() -> SatResult {
        SatResult {
            status: SatStatus::Unsat,
            model: None,
        }
    }

    pub fn unknown() -> SatResult {
        SatResult {
            status: SatStatus::Unknown,
            model: None,
        }
    }

    pub fn value(&self, var: i32) -> bool {
        self.model
            .as_ref()
            .is_some_and(|m| m.get(var.unsigned_abs() as usize).copied().unwrap_or(false))
    }

    pub fn lit_true(&self, lit: i32) -> bool {
        self.value(lit) == (lit > 0)
    }
}

/// Search limits. `seed == 0` keeps the default tie-breaking (lowest index,
/// positive phase first); other seeds perturb activities and phases
/// deterministically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SatLimits {
    pub max_conflicts: Option<u64>,
    pub time_limit: Option<Duration>,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum SatError {
    #[error("external solver crashed: {0}")]
    SolverCrashed(String),
    #[error("external solver returned an invalid model: {0}")]
    ModelInvalid(String),
    #[error("could not run external solver: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SatBackend {
    #[default]
    Internal,
    /// Command template with a `{file}` placeholder.
    External(String),
}

impl SatBackend {
    pub fn solve(&self, inst: &CnfInstance, limits: &SatLimits) -> Result<SatResult, SatError> {
        match self {
            SatBackend::Internal => Ok(sat_solve(inst, limits)),
            SatBackend::External(cmd) => sat_solve_external(inst, cmd, limits.time_limit),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_one_encoding() {
        let mut c = CnfInstance::new();
        let v: Vec<i32> = (0..3).map(|_| c.new_var()).collect();
        c.add_exactly_one(&v);
        assert_eq!(c.clauses.len(), 4);
        assert!(c.check_model(&[false, false, true, false]).is_ok());
        assert!(c.check_model(&[false, true, true, false]).is_err());
        assert!(c.check_model(&[false, false, false, false]).is_err());
    }

    #[test]
    fn dimacs_rendering() {
        let c = CnfInstance {
            n_vars: 2,
            clauses: vec![vec![1, -2], vec![2]],
        };
        assert_eq!(c.to_dimacs(), "p cnf 2 2\n1 -2 0\n2 0\n");
    }
}
