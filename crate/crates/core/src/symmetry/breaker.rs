//! Static lex-leader symmetry breakers.
//!
//! For a generator `π` with ordered support `v_1 < ... < v_m` the breaker
//! requires the assignment to be lexicographically no larger than its image:
//! chain variables `e_i <-> e_{i-1} ∧ (v_i <-> π(v_i))` with `e_0 = true`,
//! and ordering clauses `(¬e_{i-1} ∨ ¬v_i ∨ π(v_i))`.
//!
//! Only generators moving existentials of a single dependency class are
//! used. Because every variable of the class reads the same universals, the
//! pointwise lex-least image of a Skolem model is again a Skolem model, and
//! the chain variables can be given that same dependency set.

use std::str::FromStr;

use thiserror::Error;

use crate::model::{Clause, DqbfFormula, Lit, Var};

use super::perm::SymGenerator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BreakerMode {
    #[default]
    Conservative,
    /// Generators across dependency classes; not supported.
    Relaxed,
}

impl FromStr for BreakerMode {
    type Err = BreakerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conservative" => Ok(BreakerMode::Conservative),
            "relaxed" => Ok(BreakerMode::Relaxed),
            other => Err(BreakerError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BreakerError {
    #[error("relaxed symmetry breaking is not supported (generator {0})")]
    UnsupportedGenerator(String),
    #[error("unknown breaker mode `{0}`")]
    UnknownMode(String),
}

/// Positions of the lex comparison: `(v_i, π(v_i))`, skipping the second
/// element of each 2-cycle (implied by the first once earlier positions
/// agree) and stopping after a position that can never be equal.
fn comparison_positions(gen: &SymGenerator) -> Vec<(Lit, Lit)> {
    let mut out: Vec<(Lit, Lit)> = Vec::new();
    for &v in &gen.support {
        let a = v.pos();
        let b = gen.perm.apply(a);
        let closes_two_cycle = out.iter().any(|&(pa, pb)| {
            pb.var() == v && b.var() == pa.var() && pb.is_positive() == b.is_positive()
        });
        if closes_two_cycle {
            continue;
        }
        out.push((a, b));
        if b == !a {
            break;
        }
    }
    out
}

/// Appends lex-leader breakers for the usable generators. In conservative
/// mode generators moving universals or crossing dependency classes are
/// skipped with a warning; relaxed mode is rejected.
pub fn build_lex_breaker(
    f: &DqbfFormula,
    gens: &[SymGenerator],
    mode: BreakerMode,
) -> Result<DqbfFormula, BreakerError> {
    let prefix = f.prefix();
    let mut new_prefix = prefix.clone();
    let mut matrix: Vec<Clause> = f.matrix().to_vec();
    let mut next_var = f.n_declared();
    for gen in gens {
        if gen.support.is_empty() {
            continue;
        }
        if !gen.within_existential_class(f) {
            if mode == BreakerMode::Relaxed {
                return Err(BreakerError::UnsupportedGenerator(gen.to_string()));
            }
            log::warn!("skipping generator {gen}: support leaves a single existential class");
            continue;
        }
        let deps = prefix.deps(gen.support[0]).to_vec();
        let positions = comparison_positions(gen);
        let mut prev: Option<Lit> = None;
        for (i, &(a, b)) in positions.iter().enumerate() {
            let guard: Vec<Lit> = prev.map(|e| vec![!e]).unwrap_or_default();
            let mut ordering = guard.clone();
            ordering.extend([!a, b]);
            matrix.push(Clause::new(ordering));
            if i + 1 == positions.len() || b == !a {
                break;
            }
            next_var += 1;
            let e = Var::new(next_var).pos();
            new_prefix = new_prefix.with_existential(e.var(), deps.clone());
            // e -> prev, e -> (a <-> b), prev ∧ (a <-> b) -> e
            if let Some(p) = prev {
                matrix.push(Clause::new(vec![!e, p]));
            }
            matrix.push(Clause::new(vec![!e, !a, b]));
            matrix.push(Clause::new(vec![!e, a, !b]));
            let mut back1 = guard.clone();
            back1.extend([!a, !b, e]);
            matrix.push(Clause::new(back1));
            let mut back2 = guard;
            back2.extend([a, b, e]);
            matrix.push(Clause::new(back2));
            prev = Some(e);
        }
    }
    Ok(f.with_parts(new_prefix, matrix, next_var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{solve_bruteforce, OracleBudget};
    use crate::symmetry::{find_automorphisms, LitPerm, SearchBudget};

    fn swap_formula() -> DqbfFormula {
        DqbfFormula::from_dimacs(&[1], &[(2, &[1]), (3, &[1])], &[&[2, 1], &[3, 1]]).unwrap()
    }

    #[test]
    fn transposition_gives_one_clause() {
        let f = swap_formula();
        let gens = find_automorphisms(&f, &SearchBudget::default()).generators;
        let b = build_lex_breaker(&f, &gens, BreakerMode::Conservative).unwrap();
        assert_eq!(b.num_clauses(), 3);
        assert_eq!(b.clause(2), &Clause::from_dimacs(&[-2, 3]));
        assert_eq!(b.n_declared(), 3);
        assert_eq!(
            solve_bruteforce(&f, &OracleBudget::default()).decided(),
            solve_bruteforce(&b, &OracleBudget::default()).decided()
        );
    }

    #[test]
    fn no_generators_unchanged() {
        let f = swap_formula();
        let b = build_lex_breaker(&f, &[], BreakerMode::Conservative).unwrap();
        assert_eq!(b.matrix(), f.matrix());
        assert_eq!(b.prefix(), f.prefix());
    }

    #[test]
    fn three_cycle_uses_chain_variable() {
        let f = DqbfFormula::from_dimacs(
            &[1],
            &[(2, &[1]), (3, &[1]), (4, &[1])],
            &[&[2, 3, 4], &[-2, -3, 1], &[-3, -4, 1], &[-4, -2, 1]],
        )
        .unwrap();
        let cyc = LitPerm::from_positive_images(4, |v| match v.id() {
            2 => Var::new(3).pos(),
            3 => Var::new(4).pos(),
            4 => Var::new(2).pos(),
            _ => v.pos(),
        });
        let gen = SymGenerator::new(cyc);
        let b = build_lex_breaker(&f, &[gen], BreakerMode::Conservative).unwrap();
        assert_eq!(b.n_declared(), 6);
        assert_eq!(b.prefix().deps(Var::new(5)), &[Var::new(1)]);
        assert_eq!(
            solve_bruteforce(&f, &OracleBudget::default()).decided(),
            solve_bruteforce(&b, &OracleBudget::default()).decided()
        );
    }

    #[test]
    fn universal_generators_skipped_or_rejected() {
        let f = DqbfFormula::from_dimacs(&[1, 2], &[(3, &[1, 2])], &[&[3, 1], &[3, 2]]).unwrap();
        let gens = find_automorphisms(&f, &SearchBudget::default()).generators;
        assert!(!gens.is_empty());
        let b = build_lex_breaker(&f, &gens, BreakerMode::Conservative).unwrap();
        assert_eq!(b.num_clauses(), 2);
        assert!(matches!(
            build_lex_breaker(&f, &gens, BreakerMode::Relaxed),
            Err(BreakerError::UnsupportedGenerator(_))
        ));
    }
}
