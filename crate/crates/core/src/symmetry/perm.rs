use std::fmt;

use crate::model::{Clause, DqbfFormula, Lit, Var};

/// Permutation of the literals `1..=n` and their complements, stored by
/// literal code.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LitPerm {
    map: Vec<Lit>,
}

impl LitPerm {
    pub fn identity(n_vars: u32) -> LitPerm {
        LitPerm {
            map: (0..2 * (n_vars as usize + 1)).map(Lit::from_code).collect(),
        }
    }

    /// From the images of the positive literals; negative literals follow
    /// by complementation.
    pub fn from_positive_images(n_vars: u32, image: impl Fn(Var) -> Lit) -> LitPerm {
        let mut p = LitPerm::identity(n_vars);
        for v in 1..=n_vars {
            let v = Var::new(v);
            let l = image(v);
            p.map[v.pos().code()] = l;
            p.map[v.neg().code()] = !l;
        }
        p
    }

    pub fn n_vars(&self) -> u32 {
        (self.map.len() / 2 - 1) as u32
    }

    pub fn apply(&self, l: Lit) -> Lit {
        self.map.get(l.code()).copied().unwrap_or(l)
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        c.map_lits(|l| self.apply(l))
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &LitPerm) -> LitPerm {
        LitPerm {
            map: self.map.iter().map(|&l| next.apply(l)).collect(),
        }
    }

    pub fn inverse(&self) -> LitPerm {
        let mut map = self.map.clone();
        for (code, &img) in self.map.iter().enumerate() {
            map[img.code()] = Lit::from_code(code);
        }
        LitPerm { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(c, l)| l.code() == c)
    }

    /// Variables whose positive literal is not fixed.
    pub fn support(&self) -> Vec<Var> {
        (1..=self.n_vars())
            .map(Var::new)
            .filter(|v| self.apply(v.pos()) != v.pos())
            .collect()
    }

    /// Whether images of complementary literals are complementary and the
    /// map is a bijection.
    pub fn is_consistent(&self) -> bool {
        let mut seen = vec![false; self.map.len()];
        for (code, &l) in self.map.iter().enumerate().skip(2) {
            if l.code() < 2 || l.code() >= self.map.len() || seen[l.code()] {
                return false;
            }
            seen[l.code()] = true;
            if self.apply(!Lit::from_code(code)) != !l {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for LitPerm {
    /// Cycle notation over signed literals, e.g. `( 4 5 ) ( -4 -5 )`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.map.len()];
        let mut first = true;
        for v in 1..=self.n_vars() {
            for start in [Var::new(v).pos(), Var::new(v).neg()] {
                if seen[start.code()] || self.apply(start) == start {
                    continue;
                }
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "(")?;
                let mut l = start;
                loop {
                    seen[l.code()] = true;
                    write!(f, " {}", l.to_dimacs())?;
                    l = self.apply(l);
                    if l == start {
                        break;
                    }
                }
                write!(f, " )")?;
            }
        }
        Ok(())
    }
}

/// A verified symmetry of a formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymGenerator {
    pub perm: LitPerm,
    pub support: Vec<Var>,
}

impl SymGenerator {
    pub fn new(perm: LitPerm) -> SymGenerator {
        let support = perm.support();
        SymGenerator { perm, support }
    }

    /// Whether the support lies inside one class of existentials sharing a
    /// dependency set.
    pub fn within_existential_class(&self, f: &DqbfFormula) -> bool {
        let prefix = f.prefix();
        let Some(&first) = self.support.first() else {
            return false;
        };
        prefix.is_existential(first)
            && self
                .support
                .iter()
                .all(|&v| prefix.is_existential(v) && prefix.deps(v) == prefix.deps(first))
    }
}

impl fmt::Display for SymGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.perm.fmt(f)
    }
}

/// Why a permutation is not a symmetry of a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymmetryViolation {
    Inconsistent,
    QuantifierKind(Var),
    DependencySet(Var),
    ClauseMultiset,
}

/// Checks `perm` directly against the formula: complement-consistency,
/// quantifier kinds, dependency sets (mapped through `perm`) and the clause
/// multiset.
pub fn verify_symmetry(f: &DqbfFormula, perm: &LitPerm) -> Result<(), SymmetryViolation> {
    if perm.n_vars() < f.n_declared() || !perm.is_consistent() {
        return Err(SymmetryViolation::Inconsistent);
    }
    let prefix = f.prefix();
    for v in 1..=f.n_declared() {
        let v = Var::new(v);
        let w = perm.apply(v.pos()).var();
        if prefix.kind(v) != prefix.kind(w) {
            return Err(SymmetryViolation::QuantifierKind(v));
        }
        if prefix.is_existential(v) {
            let mut mapped: Vec<Var> = prefix
                .deps(v)
                .iter()
                .map(|&u| perm.apply(u.pos()).var())
                .collect();
            mapped.sort_unstable();
            if mapped != prefix.deps(w) {
                return Err(SymmetryViolation::DependencySet(v));
            }
        }
    }
    let mut image: Vec<Clause> = f.matrix().iter().map(|c| perm.apply_clause(c)).collect();
    image.sort();
    if image != f.sorted_matrix() {
        return Err(SymmetryViolation::ClauseMultiset);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap(n: u32, a: u32, b: u32) -> LitPerm {
        LitPerm::from_positive_images(n, |v| {
            if v.id() == a {
                Var::new(b).pos()
            } else if v.id() == b {
                Var::new(a).pos()
            } else {
                v.pos()
            }
        })
    }

    #[test]
    fn cycle_notation() {
        assert_eq!(swap(5, 4, 5).to_string(), "( 4 5 ) ( -4 -5 )");
        assert_eq!(LitPerm::identity(3).to_string(), "");
        let flip = LitPerm::from_positive_images(2, |v| if v.id() == 2 { v.neg() } else { v.pos() });
        assert_eq!(flip.to_string(), "( 2 -2 )");
    }

    #[test]
    fn compose_and_invert() {
        let p = swap(3, 1, 2);
        let q = swap(3, 2, 3);
        let pq = p.then(&q);
        assert_eq!(pq.apply(Var::new(1).pos()), Var::new(3).pos());
        assert!(pq.then(&pq.inverse()).is_identity());
        assert!(pq.is_consistent());
        assert_eq!(pq.support().len(), 3);
    }

    #[test]
    fn verification() {
        let f = DqbfFormula::from_dimacs(&[1], &[(2, &[1]), (3, &[1])], &[&[2, 1], &[3, 1]]).unwrap();
        assert_eq!(verify_symmetry(&f, &swap(3, 2, 3)), Ok(()));
        assert_eq!(
            verify_symmetry(&f, &swap(3, 1, 2)),
            Err(SymmetryViolation::QuantifierKind(Var::new(1)))
        );
        let g = DqbfFormula::from_dimacs(&[1], &[(2, &[1]), (3, &[])], &[&[2], &[3]]).unwrap();
        assert_eq!(
            verify_symmetry(&g, &swap(3, 2, 3)),
            Err(SymmetryViolation::DependencySet(Var::new(2)))
        );
        let h = DqbfFormula::from_dimacs(&[1], &[(2, &[1]), (3, &[1])], &[&[2, 1], &[-3, 1]]).unwrap();
        assert_eq!(
            verify_symmetry(&h, &swap(3, 2, 3)),
            Err(SymmetryViolation::ClauseMultiset)
        );
    }
}
