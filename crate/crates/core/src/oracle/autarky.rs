use std::collections::BTreeMap;

use crate::model::{Clause, DqbfFormula, Lit, Prefix, Var};
use crate::sat::{sat_solve, CnfInstance, SatLimits, SatStatus};

use super::{BoolFunc, OracleError};

/// Beyond this many free universal variables tautology checks go to SAT.
pub const ENUM_CAP: usize = 20;

/// Partial map from existential variables to Boolean functions over (a
/// subset of) their dependency sets. The empty map is the trivial autarky.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Autarky {
    funcs: BTreeMap<Var, BoolFunc>,
}

impl Autarky {
    pub fn new() -> Autarky {
        Autarky::default()
    }

    pub fn single(y: Var, f: BoolFunc) -> Autarky {
        let mut a = Autarky::new();
        a.insert(y, f);
        a
    }

    pub fn insert(&mut self, y: Var, f: BoolFunc) -> Option<BoolFunc> {
        self.funcs.insert(y, f)
    }

    pub fn get(&self, y: Var) -> Option<&BoolFunc> {
        self.funcs.get(&y)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &BoolFunc)> {
        self.funcs.iter().map(|(&y, f)| (y, f))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.funcs.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    /// Every assigned variable is existential and its function's domain is
    /// within the dependency set.
    pub fn check_prefix(&self, prefix: &Prefix) -> Result<(), OracleError> {
        for (y, f) in self.iter() {
            if !prefix.is_existential(y) || f.domain().iter().any(|&u| !prefix.depends_on(y, u)) {
                return Err(OracleError::PrefixViolation(y));
            }
        }
        Ok(())
    }

    /// Same assignment with every function's table-level semantics compared.
    pub fn equivalent(&self, other: &Autarky) -> bool {
        self.funcs.len() == other.funcs.len()
            && self
                .iter()
                .all(|(y, f)| other.get(y).is_some_and(|g| f.equivalent(g)))
    }
}

impl FromIterator<(Var, BoolFunc)> for Autarky {
    fn from_iter<T: IntoIterator<Item = (Var, BoolFunc)>>(iter: T) -> Self {
        Autarky {
            funcs: iter.into_iter().collect(),
        }
    }
}

/// Indices of clauses containing a literal of an assigned variable.
pub fn touched_clauses(f: &DqbfFormula, a: &Autarky) -> Vec<usize> {
    if a.is_empty() {
        return Vec::new();
    }
    f.matrix()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.lits().iter().any(|l| a.get(l.var()).is_some()))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TautologyMethod {
    /// Enumerate up to [`ENUM_CAP`] free variables, SAT beyond.
    Auto,
    Enumerate,
    Sat,
}

struct Substituted<'a> {
    /// Universal literals of the clause.
    universal: Vec<Lit>,
    /// Assigned existential literals with their functions.
    assigned: Vec<(Lit, &'a BoolFunc)>,
}

fn substitute<'a>(prefix: &Prefix, clause: &Clause, a: &'a Autarky) -> Substituted<'a> {
    let mut universal = Vec::new();
    let mut assigned = Vec::new();
    for &l in clause.lits() {
        if prefix.is_universal(l.var()) {
            universal.push(l);
        } else if let Some(func) = a.get(l.var()) {
            assigned.push((l, func));
        }
    }
    Substituted {
        universal,
        assigned,
    }
}

pub fn substituted_tautology(f: &DqbfFormula, c: usize, a: &Autarky) -> bool {
    substituted_tautology_with(f, c, a, TautologyMethod::Auto)
}

/// Whether clause `c`, with assigned existential literals replaced by their
/// functions and unassigned existential literals dropped, is a tautology
/// over the universal variables. A clause with a complementary pair is
/// always a tautology.
pub fn substituted_tautology_with(
    f: &DqbfFormula,
    c: usize,
    a: &Autarky,
    method: TautologyMethod,
) -> bool {
    let clause = f.clause(c);
    if clause.is_tautological() {
        return true;
    }
    let sub = substitute(f.prefix(), clause, a);

    let mut relevant: Vec<Var> = sub
        .assigned
        .iter()
        .flat_map(|(_, func)| func.domain().iter().copied())
        .collect();
    relevant.sort_unstable();
    relevant.dedup();
    // Universal literals outside every function domain can be falsified
    // independently; those inside fix their variable.
    let fixed: Vec<Lit> = sub
        .universal
        .iter()
        .copied()
        .filter(|l| relevant.binary_search(&l.var()).is_ok())
        .collect();
    let free: Vec<Var> = relevant
        .iter()
        .copied()
        .filter(|v| !fixed.iter().any(|l| l.var() == *v))
        .collect();

    let use_sat = match method {
        TautologyMethod::Auto => free.len() > ENUM_CAP,
        TautologyMethod::Enumerate => false,
        TautologyMethod::Sat => true,
    };
    if use_sat {
        tautology_by_sat(&relevant, &fixed, &sub.assigned)
    } else {
        tautology_by_enumeration(&relevant, &fixed, &free, &sub.assigned)
    }
}

fn tautology_by_enumeration(
    relevant: &[Var],
    fixed: &[Lit],
    free: &[Var],
    assigned: &[(Lit, &BoolFunc)],
) -> bool {
    assert!(free.len() < 63, "enumeration over {} variables", free.len());
    let mut values = vec![false; relevant.len()];
    for l in fixed {
        values[relevant.binary_search(&l.var()).unwrap()] = !l.is_positive();
    }
    let free_pos: Vec<usize> = free
        .iter()
        .map(|v| relevant.binary_search(v).unwrap())
        .collect();
    (0u64..1 << free.len()).all(|bits| {
        for (i, &p) in free_pos.iter().enumerate() {
            values[p] = bits >> i & 1 == 1;
        }
        let value = |v: Var| values[relevant.binary_search(&v).unwrap()];
        assigned
            .iter()
            .any(|(lit, func)| func.eval(value) == lit.is_positive())
    })
}

/// Refutes the negation: every substituted literal false.
fn tautology_by_sat(relevant: &[Var], fixed: &[Lit], assigned: &[(Lit, &BoolFunc)]) -> bool {
    let mut cnf = CnfInstance::new();
    let vars: Vec<i32> = relevant.iter().map(|_| cnf.new_var()).collect();
    let to_int = |l: Lit| {
        let v = vars[relevant.binary_search(&l.var()).unwrap()];
        if l.is_positive() {
            v
        } else {
            -v
        }
    };
    for &l in fixed {
        cnf.add_clause([-to_int(l)]);
    }
    for (lit, func) in assigned {
        if lit.is_positive() {
            // func must be 0: every cube falsified
            for cube in func.cover() {
                cnf.add_clause(cube.iter().map(|&l| -to_int(l)));
            }
        } else {
            // func must be 1: some cube satisfied
            let mut selectors = Vec::new();
            for cube in func.cover() {
                let s = cnf.new_var();
                for &l in cube {
                    cnf.add_clause([-s, to_int(l)]);
                }
                selectors.push(s);
            }
            cnf.add_clause(selectors);
        }
    }
    sat_solve(&cnf, &SatLimits::default()).status == SatStatus::Unsat
}

pub fn is_autarky(f: &DqbfFormula, a: &Autarky) -> bool {
    is_autarky_with(f, a, TautologyMethod::Auto).is_ok()
}

/// Checks the prefix constraints and that every touched clause becomes a
/// tautology; reports the first failing clause.
pub fn is_autarky_with(
    f: &DqbfFormula,
    a: &Autarky,
    method: TautologyMethod,
) -> Result<(), OracleError> {
    a.check_prefix(f.prefix())?;
    for c in touched_clauses(f, a) {
        if !substituted_tautology_with(f, c, a, method) {
            return Err(OracleError::NotAnAutarky { clause: c });
        }
    }
    Ok(())
}

/// `F[a]`: the matrix without the clauses touched by `a`; prefix unchanged.
pub fn apply_autarky(f: &DqbfFormula, a: &Autarky) -> Result<DqbfFormula, OracleError> {
    is_autarky_with(f, a, TautologyMethod::Auto)?;
    let touched = touched_clauses(f, a);
    let mut next = touched.iter().peekable();
    let matrix = f
        .matrix()
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            if next.peek() == Some(&i) {
                next.next();
                false
            } else {
                true
            }
        })
        .map(|(_, c)| c.clone())
        .collect();
    Ok(f.with_matrix(matrix))
}

/// Acts like `psi` on the variables `psi` assigns and like `phi` elsewhere.
pub fn compose_autarkies(phi: &Autarky, psi: &Autarky) -> Autarky {
    let mut out = phi.clone();
    for (y, func) in psi.iter() {
        out.insert(y, func.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::example_formula;
    use proptest::prelude::*;

    fn v(i: u32) -> Var {
        Var::new(i)
    }

    fn y2_false() -> Autarky {
        Autarky::single(v(5), BoolFunc::constant(false))
    }

    fn y3_is_x1() -> Autarky {
        Autarky::single(v(6), BoolFunc::literal(v(1).pos()))
    }

    #[test]
    fn touched_sets() {
        let f = example_formula();
        assert_eq!(touched_clauses(&f, &y2_false()), vec![2]);
        assert_eq!(touched_clauses(&f, &y3_is_x1()), vec![3, 4]);
        assert!(touched_clauses(&f, &Autarky::new()).is_empty());
    }

    #[test]
    fn substitution_examples() {
        let f = example_formula();
        // (-y3 v x1) with y3 -> x1 becomes (-x1 v x1)
        assert!(substituted_tautology(&f, 4, &y3_is_x1()));
        // (-y1 v x2) with y1 -> 1 becomes (0 v x2)
        let y1_true = Autarky::single(v(4), BoolFunc::constant(true));
        assert!(!substituted_tautology(&f, 1, &y1_true));
        let g = DqbfFormula::from_dimacs(&[1], &[(2, &[1])], &[&[1, -1, 2]]).unwrap();
        assert!(substituted_tautology(&g, 0, &Autarky::new()));
        assert!(substituted_tautology(&g, 0, &Autarky::single(v(2), BoolFunc::constant(false))));
    }

    #[test]
    fn autarky_examples() {
        let f = example_formula();
        assert!(is_autarky(&f, &y2_false()));
        assert!(is_autarky(&f, &y3_is_x1()));
        assert!(!is_autarky(&f, &Autarky::single(v(4), BoolFunc::constant(true))));
        assert!(is_autarky(&f, &Autarky::new()));
        // function reading a variable outside D(y3)
        let bad = Autarky::single(v(6), BoolFunc::literal(v(2).pos()));
        assert_eq!(
            is_autarky_with(&f, &bad, TautologyMethod::Auto),
            Err(OracleError::PrefixViolation(v(6)))
        );
    }

    #[test]
    fn worked_reduction() {
        let f = example_formula();
        let g = apply_autarky(&f, &y2_false()).unwrap();
        let h = apply_autarky(&g, &y3_is_x1()).unwrap();
        assert_eq!(
            h.matrix(),
            &[Clause::from_dimacs(&[4, 1]), Clause::from_dimacs(&[-4, 2])]
        );
        assert_eq!(h.prefix(), f.prefix());
        assert_eq!(apply_autarky(&f, &Autarky::new()).unwrap().matrix(), f.matrix());
        assert!(matches!(
            apply_autarky(&f, &Autarky::single(v(4), BoolFunc::constant(true))),
            Err(OracleError::NotAnAutarky { clause: 1 })
        ));
    }

    #[test]
    fn composition() {
        let f = example_formula();
        let both = compose_autarkies(&y2_false(), &y3_is_x1());
        assert_eq!(both.len(), 2);
        assert!(is_autarky(&f, &both));
        assert_eq!(compose_autarkies(&y2_false(), &Autarky::new()), y2_false());
        let one = Autarky::single(v(5), BoolFunc::constant(true));
        assert_eq!(compose_autarkies(&y2_false(), &one), one);
    }

    fn random_case() -> impl Strategy<Value = (DqbfFormula, Autarky)> {
        // universals 1..=4, existentials 5..=7 each depending on all universals
        let lit = (1u32..=7, any::<bool>()).prop_map(|(v, s)| if s { v as i64 } else { -(v as i64) });
        let clauses = prop::collection::vec(prop::collection::vec(lit, 1..=4), 1..6);
        let cube = prop::collection::vec((1u32..=4, any::<bool>()), 0..=3);
        let func = prop::collection::vec(cube, 0..=3);
        let funcs = prop::collection::vec(prop::option::of(func), 3);
        (clauses, funcs).prop_map(|(clauses, funcs)| {
            let deps: &[u32] = &[1, 2, 3, 4];
            let refs: Vec<&[i64]> = clauses.iter().map(|c| c.as_slice()).collect();
            let f = DqbfFormula::from_dimacs(&[1, 2, 3, 4], &[(5, deps), (6, deps), (7, deps)], &refs)
                .unwrap();
            let a = funcs
                .into_iter()
                .enumerate()
                .filter_map(|(i, func)| {
                    func.map(|cubes| {
                        let cover = cubes
                            .into_iter()
                            .map(|c| c.into_iter().map(|(u, s)| Lit::new(Var::new(u), s)).collect())
                            .collect();
                        let dom = (1..=4).map(Var::new).collect();
                        (Var::new(5 + i as u32), BoolFunc::new(dom, cover).unwrap())
                    })
                })
                .collect();
            (f, a)
        })
    }

    proptest! {
        #[test]
        fn enumeration_and_sat_refutation_agree((f, a) in random_case()) {
            for c in 0..f.num_clauses() {
                prop_assert_eq!(
                    substituted_tautology_with(&f, c, &a, TautologyMethod::Enumerate),
                    substituted_tautology_with(&f, c, &a, TautologyMethod::Sat)
                );
            }
        }
    }
}
