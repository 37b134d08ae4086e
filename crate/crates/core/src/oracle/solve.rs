use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::model::{DqbfFormula, Var};

use super::{Autarky, BoolFunc};

/// Resource limits for brute-force procedures. The cost of a run is checked
/// before it starts; exceeding any limit is reported, never guessed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBudget {
    pub max_skolem_candidates: u64,
    pub max_universal_assignments: u64,
    pub time_limit: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_skolem_candidates: 1 << 24,
            max_universal_assignments: 1 << 20,
            time_limit: None,
        }
    }
}

/// A total choice of functions, one per existential, over exactly its
/// dependency set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemAssignment {
    pub funcs: BTreeMap<Var, BoolFunc>,
}

impl SkolemAssignment {
    pub fn to_autarky(&self) -> Autarky {
        self.funcs.iter().map(|(&y, f)| (y, f.clone())).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Sat(SkolemAssignment),
    Unsat,
    BudgetExceeded { log2_cost: f64 },
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveOutcome::Unsat)
    }

    /// `Some(true)` for SAT, `Some(false)` for UNSAT, `None` when over budget.
    pub fn decided(&self) -> Option<bool> {
        match self {
            SolveOutcome::Sat(_) => Some(true),
            SolveOutcome::Unsat => Some(false),
            SolveOutcome::BudgetExceeded { .. } => None,
        }
    }
}

/// A clause after fixing the universals: satisfied iff some candidate bit in
/// `pos` is 1 or some bit in `neg` is 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Residual {
    pos: u64,
    neg: u64,
}

/// Decides the formula by enumerating every Skolem candidate for the
/// existentials that occur in the matrix and checking it against every
/// assignment of the relevant universals.
pub fn solve_bruteforce(f: &DqbfFormula, budget: &OracleBudget) -> SolveOutcome {
    let prefix = f.prefix();
    let occurring = f.occurring_existentials();

    let mut universals: Vec<Var> = f
        .matrix()
        .iter()
        .flat_map(|c| c.lits())
        .map(|l| l.var())
        .filter(|&v| prefix.is_universal(v))
        .chain(occurring.iter().flat_map(|&y| prefix.deps(y).iter().copied()))
        .collect();
    universals.sort_unstable();
    universals.dedup();

    let log2_candidates: f64 = occurring
        .iter()
        .map(|&y| 2f64.powi(prefix.deps(y).len().min(1000) as i32))
        .sum();
    let log2_cost = log2_candidates + universals.len() as f64;
    let n_bits = log2_candidates as u64;
    if log2_candidates > 63.0
        || (1u64 << n_bits) > budget.max_skolem_candidates
        || universals.len() >= 64
        || (1u64 << universals.len()) > budget.max_universal_assignments
    {
        return SolveOutcome::BudgetExceeded { log2_cost };
    }

    // bit offset of each occurring existential's truth table in a candidate
    let mut offsets = Vec::with_capacity(occurring.len());
    let mut off = 0u32;
    for &y in &occurring {
        offsets.push(off);
        off += 1 << prefix.deps(y).len();
    }
    let slot = |v: Var| occurring.binary_search(&v).ok();
    let upos = |v: Var| universals.binary_search(&v).unwrap();

    let mut residuals = Vec::new();
    for sigma in 0u64..1 << universals.len() {
        let uval = |v: Var| sigma >> upos(v) & 1 == 1;
        'clause: for c in f.matrix() {
            let mut r = Residual { pos: 0, neg: 0 };
            for &l in c.lits() {
                if prefix.is_universal(l.var()) {
                    if l.eval(uval(l.var())) {
                        continue 'clause;
                    }
                } else if let Some(j) = slot(l.var()) {
                    let row = prefix
                        .deps(l.var())
                        .iter()
                        .enumerate()
                        .fold(0u32, |acc, (i, &u)| acc | u32::from(uval(u)) << i);
                    let bit = 1u64 << (offsets[j] + row);
                    if l.is_positive() {
                        r.pos |= bit;
                    } else {
                        r.neg |= bit;
                    }
                }
            }
            if r.pos & r.neg != 0 {
                continue;
            }
            if r.pos == 0 && r.neg == 0 {
                return SolveOutcome::Unsat;
            }
            residuals.push(r);
        }
    }
    residuals.sort_unstable();
    residuals.dedup();

    let start = Instant::now();
    for cand in 0u64..1 << n_bits {
        if cand & 0xfff == 0xfff && budget.time_limit.is_some_and(|t| start.elapsed() >= t) {
            return SolveOutcome::BudgetExceeded { log2_cost };
        }
        if residuals
            .iter()
            .all(|r| cand & r.pos != 0 || !cand & r.neg != 0)
        {
            let mut funcs = BTreeMap::new();
            for y in prefix.existentials() {
                let d = prefix.deps(y).to_vec();
                let func = match slot(y) {
                    Some(j) => BoolFunc::from_rows(d, |row| cand >> (offsets[j] as usize + row) & 1 == 1),
                    None => BoolFunc::constant_over(d, false),
                };
                funcs.insert(y, func);
            }
            return SolveOutcome::Sat(SkolemAssignment { funcs });
        }
    }
    SolveOutcome::Unsat
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::example_formula;
    use crate::oracle::{apply_autarky, is_autarky};

    #[test]
    fn example_is_unsat() {
        assert_eq!(
            solve_bruteforce(&example_formula(), &OracleBudget::default()),
            SolveOutcome::Unsat
        );
    }

    #[test]
    fn empty_matrix_is_sat() {
        let f = example_formula().with_matrix(vec![]);
        assert!(solve_bruteforce(&f, &OracleBudget::default()).is_sat());
    }

    #[test]
    fn unit_existential() {
        let f = DqbfFormula::from_dimacs(&[], &[(1, &[])], &[&[1]]).unwrap();
        let SolveOutcome::Sat(s) = solve_bruteforce(&f, &OracleBudget::default()) else {
            panic!("expected SAT");
        };
        assert!(s.funcs[&Var::new(1)].is_const_true());
    }

    #[test]
    fn dependency_sets_matter() {
        // y must equal x, possible only if y may read x
        let clauses: &[&[i64]] = &[&[2, -1], &[-2, 1]];
        let with = DqbfFormula::from_dimacs(&[1], &[(2, &[1])], clauses).unwrap();
        let without = DqbfFormula::from_dimacs(&[1], &[(2, &[])], clauses).unwrap();
        assert!(solve_bruteforce(&with, &OracleBudget::default()).is_sat());
        assert!(solve_bruteforce(&without, &OracleBudget::default()).is_unsat());
    }

    #[test]
    fn skolem_model_is_an_autarky_touching_everything() {
        let f = example_formula().with_matrix(example_formula().matrix()[2..].to_vec());
        let SolveOutcome::Sat(s) = solve_bruteforce(&f, &OracleBudget::default()) else {
            panic!("expected SAT");
        };
        let a = s.to_autarky();
        assert!(is_autarky(&f, &a));
        assert_eq!(apply_autarky(&f, &a).unwrap().num_clauses(), 0);
    }

    #[test]
    fn budget_is_reported() {
        let f = example_formula();
        let tight = OracleBudget {
            max_skolem_candidates: 16,
            ..OracleBudget::default()
        };
        let SolveOutcome::BudgetExceeded { log2_cost } = solve_bruteforce(&f, &tight) else {
            panic!("expected budget exhaustion");
        };
        // tables of 4 + 4 + 2 bits, 3 universals
        assert_eq!(log2_cost, 13.0);
    }
}
