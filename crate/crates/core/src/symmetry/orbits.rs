use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::{Clause, DqbfFormula};

use super::perm::{LitPerm, SymGenerator};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseOrbit {
    /// Smallest clause index of the orbit.
    pub representative: usize,
    /// Every member (representative included, with the identity) and a
    /// permutation mapping the representative clause onto it.
    pub members: Vec<(usize, LitPerm)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseOrbits {
    orbits: Vec<ClauseOrbit>,
}

impl ClauseOrbits {
    pub fn orbits(&self) -> &[ClauseOrbit] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// Orbit index of every clause.
    pub fn orbit_of(&self) -> Vec<usize> {
        let n = self.orbits.iter().map(|o| o.members.len()).sum();
        let mut out = vec![0; n];
        for (k, o) in self.orbits.iter().enumerate() {
            for (m, _) in &o.members {
                out[*m] = k;
            }
        }
        out
    }
}

/// Partition of the clauses into orbits under the group generated by
/// `gens`. Identical clauses always share an orbit.
pub fn clause_orbits(f: &DqbfFormula, gens: &[SymGenerator]) -> ClauseOrbits {
    let mut by_content: BTreeMap<&Clause, Vec<usize>> = BTreeMap::new();
    for (i, c) in f.matrix().iter().enumerate() {
        by_content.entry(c).or_default().push(i);
    }
    let n = f.n_declared().max(gens.iter().map(|g| g.perm.n_vars()).max().unwrap_or(0));
    let mut done = vec![false; f.num_clauses()];
    let mut orbits = Vec::new();
    for start in 0..f.num_clauses() {
        if done[start] {
            continue;
        }
        let mut members = Vec::new();
        let mut seen: BTreeSet<Clause> = BTreeSet::new();
        let mut queue = VecDeque::new();
        let rep_clause = f.clause(start).clone();
        seen.insert(rep_clause.clone());
        queue.push_back((rep_clause, LitPerm::identity(n)));
        while let Some((clause, perm)) = queue.pop_front() {
            let Some(indices) = by_content.get(&clause) else {
                // generators valid for f never leave the clause multiset
                log::warn!("generator maps a clause outside the matrix: {clause}");
                continue;
            };
            for &i in indices {
                done[i] = true;
                members.push((i, perm.clone()));
            }
            for g in gens {
                let image = g.perm.apply_clause(&clause);
                if seen.insert(image.clone()) {
                    queue.push_back((image, perm.then(&g.perm)));
                }
            }
        }
        members.sort_by_key(|(i, _)| *i);
        orbits.push(ClauseOrbit {
            representative: start,
            members,
        });
    }
    ClauseOrbits { orbits }
}
