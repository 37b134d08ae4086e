//! Domain types for dependency quantified Boolean formulas (DQBF).
//!
//! A formula is a quantifier [`Prefix`] (universals plus existentials with
//! explicit dependency sets) and a CNF matrix of [`Clause`]s.

mod dqdimacs;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Not;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use dqdimacs::{parse_dqdimacs, parse_dqdimacs_with, print_dqdimacs, ParseError, ParseOptions};
pub use validate::{validate, InvariantCheck, ValidationReport};

/// A propositional variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(id: u32) -> Var {
        assert!(id >= 1, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal, packed as `2 * var + negated`. Ordering is by variable first,
/// positive before negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    /// From a signed DIMACS integer. Panics on 0.
    pub fn from_dimacs(value: i64) -> Lit {
        assert!(value != 0, "0 is not a literal");
        let var = Var::new(value.unsigned_abs() as u32);
        Lit::new(var, value > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0);
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }

    /// Value of the literal when its variable takes `value`.
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A clause in canonical form: literals sorted, duplicates removed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(mut lits: Vec<Lit>) -> Clause {
        lits.sort_unstable();
        lits.dedup();
        Clause { lits }
    }

    pub fn from_dimacs(lits: &[i64]) -> Clause {
        Clause::new(lits.iter().map(|&l| Lit::from_dimacs(l)).collect())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn mentions(&self, var: Var) -> bool {
        self.contains(var.pos()) || self.contains(var.neg())
    }

    /// Contains a complementary pair. Sorted order puts `v` right before `-v`.
    pub fn is_tautological(&self) -> bool {
        self.lits.windows(2).any(|w| w[1] == !w[0])
    }

    pub fn without(&self, lit: Lit) -> Clause {
        Clause {
            lits: self.lits.iter().copied().filter(|&l| l != lit).collect(),
        }
    }

    pub fn map_lits(&self, mut f: impl FnMut(Lit) -> Lit) -> Clause {
        Clause::new(self.lits.iter().map(|&l| f(l)).collect())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lits {
            write!(f, "{l} ")?;
        }
        write!(f, "0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quant {
    Universal,
    Existential,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("variable {0} is quantified both universally and existentially")]
    Overlap(Var),
    #[error("dependency set of {evar} mentions non-universal {dep}")]
    DependencyOnNonUniversal { evar: Var, dep: Var },
    #[error("literal {0} refers to a variable missing from the prefix")]
    UnboundVariable(Lit),
    #[error("variable {var} exceeds the declared count {declared}")]
    VariableOutOfRange { var: Var, declared: u32 },
}

/// Quantifier prefix. Universals are kept sorted; every existential owns a
/// sorted dependency set of universals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Prefix {
    universals: Vec<Var>,
    deps: BTreeMap<Var, Vec<Var>>,
    kinds: Vec<Option<Quant>>,
}

impl Prefix {
    pub fn new(
        universals: impl IntoIterator<Item = Var>,
        deps: impl IntoIterator<Item = (Var, Vec<Var>)>,
    ) -> Result<Prefix, ModelError> {
        let p = Prefix::new_unchecked(universals, deps);
        for (&y, d) in &p.deps {
            if p.universals.binary_search(&y).is_ok() {
                return Err(ModelError::Overlap(y));
            }
            if let Some(&dep) = d.iter().find(|&&u| !p.is_universal(u)) {
                return Err(ModelError::DependencyOnNonUniversal { evar: y, dep });
            }
        }
        Ok(p)
    }

    /// Builds a prefix without checking invariants; [`validate`] reports
    /// violations.
    pub fn new_unchecked(
        universals: impl IntoIterator<Item = Var>,
        deps: impl IntoIterator<Item = (Var, Vec<Var>)>,
    ) -> Prefix {
        let mut universals: Vec<Var> = universals.into_iter().collect();
        universals.sort_unstable();
        universals.dedup();
        let deps: BTreeMap<Var, Vec<Var>> = deps
            .into_iter()
            .map(|(y, mut d)| {
                d.sort_unstable();
                d.dedup();
                (y, d)
            })
            .collect();
        let max = universals
            .iter()
            .chain(deps.keys())
            .map(|v| v.index())
            .max()
            .unwrap_or(0);
        let mut kinds = vec![None; max + 1];
        for &u in &universals {
            kinds[u.index()] = Some(Quant::Universal);
        }
        for &y in deps.keys() {
            kinds[y.index()] = Some(Quant::Existential);
        }
        Prefix {
            universals,
            deps,
            kinds,
        }
    }

    pub fn universals(&self) -> &[Var] {
        &self.universals
    }

    pub fn existentials(&self) -> impl Iterator<Item = Var> + '_ {
        self.deps.keys().copied()
    }

    pub fn num_existentials(&self) -> usize {
        self.deps.len()
    }

    /// Dependency set of `y`; empty for variables that are not existential.
    pub fn deps(&self, y: Var) -> &[Var] {
        self.deps.get(&y).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dep_map(&self) -> &BTreeMap<Var, Vec<Var>> {
        &self.deps
    }

    pub fn kind(&self, v: Var) -> Option<Quant> {
        self.kinds.get(v.index()).copied().flatten()
    }

    pub fn is_universal(&self, v: Var) -> bool {
        self.kind(v) == Some(Quant::Universal)
    }

    pub fn is_existential(&self, v: Var) -> bool {
        self.kind(v) == Some(Quant::Existential)
    }

    pub fn depends_on(&self, y: Var, u: Var) -> bool {
        self.deps(y).binary_search(&u).is_ok()
    }

    pub fn max_var(&self) -> u32 {
        self.kinds.len().saturating_sub(1) as u32
    }

    /// Prefix with existential `y` added (used for fresh breaker variables).
    pub fn with_existential(&self, y: Var, deps: Vec<Var>) -> Prefix {
        let mut all = self.deps.clone();
        all.insert(y, deps);
        Prefix::new_unchecked(self.universals.iter().copied(), all)
    }
}

/// A DQBF: prefix plus CNF matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DqbfFormula {
    prefix: Prefix,
    matrix: Vec<Clause>,
    n_declared: u32,
    /// Free-text comment lines (without the leading `c `).
    pub comments: Vec<String>,
    pub source_name: Option<String>,
}

impl DqbfFormula {
    /// Checked constructor: every literal must be bound by the prefix and
    /// every variable must be within `n_declared`.
    pub fn new(prefix: Prefix, matrix: Vec<Clause>, n_declared: u32) -> Result<Self, ModelError> {
        if prefix.max_var() > n_declared {
            return Err(ModelError::VariableOutOfRange {
                var: Var::new(prefix.max_var()),
                declared: n_declared,
            });
        }
        for c in &matrix {
            for &l in c.lits() {
                if prefix.kind(l.var()).is_none() {
                    return Err(ModelError::UnboundVariable(l));
                }
            }
        }
        Ok(DqbfFormula::new_unchecked(prefix, matrix, n_declared))
    }

    pub fn new_unchecked(prefix: Prefix, matrix: Vec<Clause>, n_declared: u32) -> Self {
        DqbfFormula {
            prefix,
            matrix,
            n_declared,
            comments: Vec::new(),
            source_name: None,
        }
    }

    /// Builds a formula from DIMACS-style integers. Convenient in tests.
    pub fn from_dimacs(
        universals: &[u32],
        deps: &[(u32, &[u32])],
        clauses: &[&[i64]],
    ) -> Result<Self, ModelError> {
        let prefix = Prefix::new(
            universals.iter().map(|&u| Var::new(u)),
            deps.iter()
                .map(|&(y, d)| (Var::new(y), d.iter().map(|&u| Var::new(u)).collect())),
        )?;
        let matrix: Vec<Clause> = clauses.iter().map(|c| Clause::from_dimacs(c)).collect();
        let max_lit = matrix
            .iter()
            .flat_map(|c| c.lits())
            .map(|l| l.var().id())
            .max()
            .unwrap_or(0);
        let n = prefix.max_var().max(max_lit);
        DqbfFormula::new(prefix, matrix, n)
    }

    pub fn prefix(&self) -> &Prefix {
        &self.prefix
    }

    pub fn matrix(&self) -> &[Clause] {
        &self.matrix
    }

    pub fn clause(&self, idx: usize) -> &Clause {
        &self.matrix[idx]
    }

    pub fn num_clauses(&self) -> usize {
        self.matrix.len()
    }

    pub fn n_declared(&self) -> u32 {
        self.n_declared
    }

    /// Same prefix and header, new matrix. Comments are dropped.
    pub fn with_matrix(&self, matrix: Vec<Clause>) -> DqbfFormula {
        DqbfFormula {
            prefix: self.prefix.clone(),
            matrix,
            n_declared: self.n_declared,
            comments: Vec::new(),
            source_name: self.source_name.clone(),
        }
    }

    pub fn with_parts(&self, prefix: Prefix, matrix: Vec<Clause>, n_declared: u32) -> DqbfFormula {
        DqbfFormula {
            prefix,
            matrix,
            n_declared,
            comments: Vec::new(),
            source_name: self.source_name.clone(),
        }
    }

    /// Number of clauses each variable occurs in, indexed by variable id.
    pub fn occurrence_counts(&self) -> Vec<usize> {
        let mut occ = vec![0usize; self.n_declared as usize + 1];
        for c in &self.matrix {
            let mut last = None;
            for l in c.lits() {
                if last != Some(l.var()) {
                    occ[l.var().index()] += 1;
                    last = Some(l.var());
                }
            }
        }
        occ
    }

    /// Existentials occurring in at least one clause, ascending.
    pub fn occurring_existentials(&self) -> Vec<Var> {
        let occ = self.occurrence_counts();
        self.prefix
            .existentials()
            .filter(|y| occ[y.index()] > 0)
            .collect()
    }

    /// Clause multiset as a sorted vector, for order-insensitive comparison.
    pub fn sorted_matrix(&self) -> Vec<Clause> {
        let mut m = self.matrix.clone();
        m.sort();
        m
    }

    /// SHA-256 over the comment-free canonical DQDIMACS rendering.
    pub fn digest(&self) -> String {
        let mut bare = self.clone();
        bare.comments.clear();
        hex::encode(Sha256::digest(print_dqdimacs(&bare).as_bytes()))
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The running example: three universals, y1(x1,x2), y2(x2,x3), y3(x1).
    pub fn example_formula() -> DqbfFormula {
        DqbfFormula::from_dimacs(
            &[1, 2, 3],
            &[(4, &[1, 2]), (5, &[2, 3]), (6, &[1])],
            &[&[4, 1], &[-4, 2], &[-5, -2, 3], &[6, -1, 2], &[-6, 1]],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_packing() {
        let l = Lit::from_dimacs(-7);
        assert_eq!(l.var(), Var::new(7));
        assert!(!l.is_positive());
        assert_eq!(!!l, l);
        assert_eq!((!l).to_dimacs(), 7);
        assert!(Var::new(3).pos() < Var::new(3).neg());
        assert!(Var::new(3).neg() < Var::new(4).pos());
    }

    #[test]
    fn clause_canonical_form() {
        let c = Clause::from_dimacs(&[3, -1, 3, 2]);
        assert_eq!(c.lits().iter().map(|l| l.to_dimacs()).collect::<Vec<_>>(), vec![-1, 2, 3]);
        assert!(!c.is_tautological());
        assert!(Clause::from_dimacs(&[4, 1, -4]).is_tautological());
    }

    #[test]
    fn prefix_rejects_bad_dependencies() {
        let err = Prefix::new([Var::new(1)], [(Var::new(2), vec![Var::new(3)])]).unwrap_err();
        assert_eq!(
            err,
            ModelError::DependencyOnNonUniversal {
                evar: Var::new(2),
                dep: Var::new(3)
            }
        );
        assert!(Prefix::new([Var::new(1)], [(Var::new(1), vec![])]).is_err());
    }

    #[test]
    fn unbound_literal_rejected() {
        let p = Prefix::new([Var::new(1)], []).unwrap();
        let err = DqbfFormula::new(p, vec![Clause::from_dimacs(&[2])], 2).unwrap_err();
        assert!(matches!(err, ModelError::UnboundVariable(_)));
    }

    #[test]
    fn example_shape() {
        let f = fixtures::example_formula();
        assert_eq!(f.prefix().universals().len(), 3);
        assert_eq!(f.prefix().num_existentials(), 3);
        assert_eq!(f.num_clauses(), 5);
        assert_eq!(f.n_declared(), 6);
        assert!(f.prefix().depends_on(Var::new(5), Var::new(3)));
        assert!(!f.prefix().depends_on(Var::new(6), Var::new(2)));
    }
}
