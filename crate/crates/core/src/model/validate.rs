use std::collections::BTreeMap;
use std::fmt;

use super::{DqbfFormula, Quant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Option<String>,
}

/// Structural facts about a formula. Failures are reported, not raised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
    pub num_universals: usize,
    pub num_existentials: usize,
    pub num_clauses: usize,
    /// clause width -> count
    pub width_histogram: BTreeMap<usize, usize>,
    /// dependency-set size -> number of existentials
    pub dep_size_histogram: BTreeMap<usize, usize>,
    pub tautological_clauses: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "ok" } else { "FAIL" };
            match &c.detail {
                Some(d) => writeln!(f, "c {:<32} {status} ({d})", c.name)?,
                None => writeln!(f, "c {:<32} {status}", c.name)?,
            }
        }
        writeln!(
            f,
            "c universals={} existentials={} clauses={} tautological={}",
            self.num_universals, self.num_existentials, self.num_clauses, self.tautological_clauses
        )?;
        let hist = |h: &BTreeMap<usize, usize>| {
            h.iter()
                .map(|(k, v)| format!("{k}:{v}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "c clause widths {{{}}}", hist(&self.width_histogram))?;
        writeln!(f, "c dependency sizes {{{}}}", hist(&self.dep_size_histogram))
    }
}

fn check(name: &'static str, failure: Option<String>) -> InvariantCheck {
    InvariantCheck {
        name,
        passed: failure.is_none(),
        detail: failure,
    }
}

pub fn validate(f: &DqbfFormula) -> ValidationReport {
    let p = f.prefix();
    let n = f.n_declared();

    let overlap = p
        .universals()
        .iter()
        .find(|u| p.dep_map().contains_key(u))
        .map(|u| format!("variable {u}"));

    let bad_dep = p.dep_map().iter().find_map(|(y, d)| {
        d.iter()
            .find(|u| p.kind(**u) != Some(Quant::Universal))
            .map(|u| format!("{y} depends on {u}"))
    });

    let out_of_range = p
        .universals()
        .iter()
        .chain(p.dep_map().keys())
        .find(|v| v.id() > n)
        .map(|v| format!("variable {v} > {n}"))
        .or_else(|| {
            f.matrix()
                .iter()
                .flat_map(|c| c.lits())
                .find(|l| l.var().id() > n)
                .map(|l| format!("literal {l} > {n}"))
        });

    let unbound = f.matrix().iter().enumerate().find_map(|(i, c)| {
        c.lits()
            .iter()
            .find(|l| p.kind(l.var()).is_none())
            .map(|l| format!("clause {} literal {l}", i + 1))
    });

    let non_canonical = f.matrix().iter().enumerate().find_map(|(i, c)| {
        c.lits()
            .windows(2)
            .any(|w| w[0] >= w[1])
            .then(|| format!("clause {}", i + 1))
    });

    let mut width_histogram = BTreeMap::new();
    let mut tautological_clauses = 0;
    for c in f.matrix() {
        *width_histogram.entry(c.len()).or_insert(0) += 1;
        if c.is_tautological() {
            tautological_clauses += 1;
        }
    }
    let mut dep_size_histogram = BTreeMap::new();
    for d in p.dep_map().values() {
        *dep_size_histogram.entry(d.len()).or_insert(0) += 1;
    }

    ValidationReport {
        checks: vec![
            check("disjoint quantifier blocks", overlap),
            check("dependencies are universal", bad_dep),
            check("variables within header count", out_of_range),
            check("literals bound by prefix", unbound),
            check("clauses in canonical order", non_canonical),
        ],
        num_universals: p.universals().len(),
        num_existentials: p.num_existentials(),
        num_clauses: f.num_clauses(),
        width_histogram,
        dep_size_histogram,
        tautological_clauses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::example_formula;
    use crate::model::{Clause, Prefix, Var};

    #[test]
    fn example_is_valid() {
        let r = validate(&example_formula());
        assert!(r.is_valid(), "{r}");
        assert_eq!(r.width_histogram, BTreeMap::from([(2, 3), (3, 2)]));
        assert_eq!(r.dep_size_histogram, BTreeMap::from([(1, 1), (2, 2)]));
        assert_eq!(r.tautological_clauses, 0);
    }

    #[test]
    fn tautological_clause_flagged_but_valid() {
        let f = DqbfFormula::from_dimacs(&[1], &[(4, &[1])], &[&[4, -4, 1]]).unwrap();
        let r = validate(&f);
        assert!(r.is_valid());
        assert_eq!(r.tautological_clauses, 1);
    }

    #[test]
    fn unbound_literal_reported() {
        let p = Prefix::new([Var::new(1)], []).unwrap();
        let f = DqbfFormula::new_unchecked(p, vec![Clause::from_dimacs(&[1, 2])], 2);
        let r = validate(&f);
        assert!(!r.is_valid());
        let failed: Vec<_> = r.failures().map(|c| c.name).collect();
        assert_eq!(failed, vec!["literals bound by prefix"]);
    }

    #[test]
    fn bad_prefix_reported() {
        let p = Prefix::new_unchecked([Var::new(1)], [(Var::new(2), vec![Var::new(3)])]);
        let f = DqbfFormula::new_unchecked(p, vec![], 3);
        let r = validate(&f);
        assert!(!r.is_valid());
        assert!(r.failures().any(|c| c.name == "dependencies are universal"));
    }
}
