//! Per-clause tautology witnesses for A_0 and A_1.
//!
//! A witness is a small set of choices `y -> f` (constant or universal
//! literal) that alone turns a clause into a tautology after substitution.
//! The A_k encoding asks that every touched clause realizes one witness.

use std::collections::BTreeMap;

use crate::model::{DqbfFormula, Lit, Var};
use crate::oracle::{substituted_tautology, Autarky, BoolFunc};
use crate::symmetry::ClauseOrbits;

use super::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WitnessFunc {
    Const(bool),
    Lit(Lit),
}

impl WitnessFunc {
    pub fn negate(self) -> WitnessFunc {
        match self {
            WitnessFunc::Const(b) => WitnessFunc::Const(!b),
            WitnessFunc::Lit(l) => WitnessFunc::Lit(!l),
        }
    }

    pub fn to_boolfunc(self) -> BoolFunc {
        match self {
            WitnessFunc::Const(b) => BoolFunc::constant(b),
            WitnessFunc::Lit(l) => BoolFunc::literal(l),
        }
    }

    /// The function that makes literal `l` of `y` evaluate to `value`'s
    /// function: `value` itself for a positive literal, its negation otherwise.
    fn for_literal(l: Lit, value: WitnessFunc) -> WitnessFunc {
        if l.is_positive() {
            value
        } else {
            value.negate()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WitnessKind {
    /// An existential literal substituted by constant 1.
    ConstantTrue,
    /// A substituted literal equals the complement of a universal literal
    /// already in the clause.
    ComplementWithClauseLiteral,
    /// Two substituted literals are complementary.
    ComplementBetweenSubstitutions,
    /// The clause holds a complementary pair and needs nothing.
    AlreadyTautological,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TautologyWitness {
    pub clause: usize,
    pub kind: WitnessKind,
    /// Sorted by variable.
    pub choices: Vec<(Var, WitnessFunc)>,
}

impl TautologyWitness {
    pub fn to_autarky(&self) -> Autarky {
        self.choices
            .iter()
            .map(|&(y, w)| (y, w.to_boolfunc()))
            .collect()
    }
}

/// Witness lists keyed by clause index, every clause present.
pub type WitnessMap = BTreeMap<usize, Vec<TautologyWitness>>;

/// All witnesses of clause `idx` with functions of at most `k <= 1`
/// essential universals.
pub fn clause_witnesses(f: &DqbfFormula, idx: usize, k: u8) -> Vec<TautologyWitness> {
    let clause = f.clause(idx);
    let prefix = f.prefix();
    let mk = |kind, mut choices: Vec<(Var, WitnessFunc)>| {
        choices.sort();
        TautologyWitness {
            clause: idx,
            kind,
            choices,
        }
    };
    if clause.is_tautological() {
        return vec![mk(WitnessKind::AlreadyTautological, Vec::new())];
    }
    let (universal, existential): (Vec<Lit>, Vec<Lit>) = clause
        .lits()
        .iter()
        .partition(|l| prefix.is_universal(l.var()));
    let existential: Vec<Lit> = existential
        .into_iter()
        .filter(|l| prefix.is_existential(l.var()))
        .collect();

    let mut out = Vec::new();
    for &l in &existential {
        out.push(mk(
            WitnessKind::ConstantTrue,
            vec![(l.var(), WitnessFunc::for_literal(l, WitnessFunc::Const(true)))],
        ));
    }
    if k >= 1 {
        for &l in &existential {
            for &w in &universal {
                if prefix.depends_on(l.var(), w.var()) {
                    let target = WitnessFunc::Lit(!w);
                    out.push(mk(
                        WitnessKind::ComplementWithClauseLiteral,
                        vec![(l.var(), WitnessFunc::for_literal(l, target))],
                    ));
                }
            }
        }
        for (i, &l1) in existential.iter().enumerate() {
            for &l2 in &existential[i + 1..] {
                for &x in prefix.deps(l1.var()) {
                    if !prefix.depends_on(l2.var(), x) {
                        continue;
                    }
                    for positive in [true, false] {
                        let s = WitnessFunc::Lit(Lit::new(x, positive));
                        out.push(mk(
                            WitnessKind::ComplementBetweenSubstitutions,
                            vec![
                                (l1.var(), WitnessFunc::for_literal(l1, s)),
                                (l2.var(), WitnessFunc::for_literal(l2, s.negate())),
                            ],
                        ));
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Clause-wise compilation over the whole matrix.
pub fn compile_tautology_witnesses(f: &DqbfFormula, k: u8) -> WitnessMap {
    (0..f.num_clauses())
        .map(|i| (i, clause_witnesses(f, i, k)))
        .collect()
}

/// Compiles one representative per clause orbit and transports its witnesses
/// to the other members along the orbit permutations. Every transported
/// witness is checked against its target clause; a permutation that fails
/// to carry a valid witness is reported so the caller can fall back to
/// clause-wise compilation.
pub fn compile_with_symmetry(
    f: &DqbfFormula,
    orbits: &ClauseOrbits,
    k: u8,
) -> Result<WitnessMap, EngineError> {
    let prefix = f.prefix();
    let mut out = WitnessMap::new();
    for orbit in orbits.orbits() {
        let rep = orbit.representative;
        let base = clause_witnesses(f, rep, k);
        for (member, perm) in &orbit.members {
            let member = *member;
            if perm.apply_clause(f.clause(rep)) != *f.clause(member) {
                return Err(EngineError::OrbitPermutationInvalid(member));
            }
            let mut list = Vec::with_capacity(base.len());
            for w in &base {
                let mut choices: Vec<(Var, WitnessFunc)> = w
                    .choices
                    .iter()
                    .map(|&(y, func)| {
                        let image = perm.apply(y.pos());
                        let func = match func {
                            WitnessFunc::Const(b) => WitnessFunc::Const(b),
                            WitnessFunc::Lit(u) => WitnessFunc::Lit(perm.apply(u)),
                        };
                        let func = if image.is_positive() {
                            func
                        } else {
                            func.negate()
                        };
                        (image.var(), func)
                    })
                    .collect();
                choices.sort();
                let moved = TautologyWitness {
                    clause: member,
                    kind: w.kind,
                    choices,
                };
                let prefix_ok = moved.choices.iter().all(|&(y, func)| {
                    prefix.is_existential(y)
                        && match func {
                            WitnessFunc::Const(_) => true,
                            WitnessFunc::Lit(u) => prefix.depends_on(y, u.var()),
                        }
                });
                let realizes = if moved.kind == WitnessKind::AlreadyTautological {
                    f.clause(member).is_tautological()
                } else {
                    substituted_tautology(f, member, &moved.to_autarky())
                };
                if !prefix_ok || !realizes {
                    return Err(EngineError::OrbitPermutationInvalid(member));
                }
                list.push(moved);
            }
            list.sort();
            list.dedup();
            out.insert(member, list);
        }
    }
    for i in 0..f.num_clauses() {
        if !out.contains_key(&i) {
            return Err(EngineError::OrbitPermutationInvalid(i));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::example_formula;

    fn v(i: u32) -> Var {
        Var::new(i)
    }

    #[test]
    fn single_clause_kinds() {
        // (y1 ∨ x1) with D(y1) = {x1, x2}
        let f = DqbfFormula::from_dimacs(&[1, 2], &[(3, &[1, 2])], &[&[3, 1]]).unwrap();
        let ws = clause_witnesses(&f, 0, 1);
        let kinds: Vec<_> = ws.iter().map(|w| (w.kind, w.choices.clone())).collect();
        assert!(kinds.contains(&(
            WitnessKind::ConstantTrue,
            vec![(v(3), WitnessFunc::Const(true))]
        )));
        assert!(kinds.contains(&(
            WitnessKind::ComplementWithClauseLiteral,
            vec![(v(3), WitnessFunc::Lit(v(1).neg()))]
        )));
        assert_eq!(ws.len(), 2);
        assert_eq!(clause_witnesses(&f, 0, 0).len(), 1);
    }

    #[test]
    fn negative_literal_flips_function() {
        let f = DqbfFormula::from_dimacs(&[1], &[(2, &[1])], &[&[-2, 1]]).unwrap();
        let ws = clause_witnesses(&f, 0, 1);
        assert_eq!(ws[0].choices, vec![(v(2), WitnessFunc::Const(false))]);
        assert_eq!(ws[1].choices, vec![(v(2), WitnessFunc::Lit(v(1).pos()))]);
        for w in ws {
            assert!(substituted_tautology(&f, 0, &w.to_autarky()));
        }
    }

    #[test]
    fn pair_witnesses_need_shared_dependency() {
        let f = DqbfFormula::from_dimacs(&[1, 2], &[(3, &[1]), (4, &[1, 2])], &[&[3, 4]]).unwrap();
        let pairs: Vec<_> = clause_witnesses(&f, 0, 1)
            .into_iter()
            .filter(|w| w.kind == WitnessKind::ComplementBetweenSubstitutions)
            .collect();
        assert_eq!(pairs.len(), 2);
        for w in &pairs {
            assert!(substituted_tautology(&f, 0, &w.to_autarky()));
        }
    }

    #[test]
    fn tautological_clause_single_witness() {
        let f = DqbfFormula::from_dimacs(&[1], &[(2, &[1])], &[&[1, -1, 2]]).unwrap();
        let ws = clause_witnesses(&f, 0, 1);
        assert_eq!(ws.len(), 1);
        assert_eq!(ws[0].kind, WitnessKind::AlreadyTautological);
        assert!(ws[0].choices.is_empty());
    }

    #[test]
    fn every_witness_realizes_its_clause() {
        let f = example_formula();
        for (i, ws) in compile_tautology_witnesses(&f, 1) {
            for w in ws {
                assert!(substituted_tautology(&f, i, &w.to_autarky()), "{w:?}");
            }
        }
    }
}
