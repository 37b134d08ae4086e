//! Automorphism search by individualization and refinement.
//!
//! The first path individualizes the first vertex of the smallest
//! non-singleton color at every level until the coloring is discrete. For
//! every level (deepest first) and every other vertex of that level's cell
//! not already known to share an orbit with the first-path vertex, a
//! backtracking search looks for a leaf with the same refinement trace
//! whose induced vertex map is an automorphism.

use crate::model::{DqbfFormula, Var};

use super::graph::{build_symmetry_graph, individualize, target_cell, ColoredGraph};
use super::perm::{verify_symmetry, LitPerm, SymGenerator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Search-tree nodes explored before giving up.
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    pub generators: Vec<SymGenerator>,
    /// False when the node budget ran out; the list is then partial.
    pub complete: bool,
    pub nodes: u64,
}

struct Level {
    colors: Vec<u32>,
    cell: Vec<usize>,
    chosen: usize,
    /// Trace after individualizing `chosen` and refining.
    trace: u64,
}

struct Searcher<'a> {
    g: &'a ColoredGraph,
    levels: Vec<Level>,
    first_leaf: Vec<u32>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Searcher<'_> {
    fn leaf_perm(&self, leaf: &[u32]) -> Option<Vec<u32>> {
        let mut inv = vec![0u32; leaf.len()];
        for (v, &c) in leaf.iter().enumerate() {
            inv[c as usize] = v as u32;
        }
        let perm: Vec<u32> = self.first_leaf.iter().map(|&c| inv[c as usize]).collect();
        self.g.is_automorphism(&perm).then_some(perm)
    }

    /// Backtracking below depth `depth` (the coloring is refined and
    /// matches the first path's trace up to here).
    fn descend(&mut self, depth: usize, colors: &[u32]) -> Option<Vec<u32>> {
        let Some(cell) = target_cell(colors) else {
            return self.leaf_perm(colors);
        };
        if depth >= self.levels.len() {
            return None;
        }
        for u in cell {
            if self.nodes >= self.budget {
                self.exhausted = true;
                return None;
            }
            self.nodes += 1;
            let mut next = individualize(colors, u);
            if self.g.refine(&mut next) != self.levels[depth].trace {
                continue;
            }
            if let Some(p) = self.descend(depth + 1, &next) {
                return Some(p);
            }
            if self.exhausted {
                return None;
            }
        }
        None
    }
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

/// Generators of (a subgroup of) the color-preserving automorphism group.
pub fn find_generators(g: &ColoredGraph, budget: &SearchBudget) -> GeneratorSet {
    let mut colors = g.initial_colors().to_vec();
    g.refine(&mut colors);
    let mut levels = Vec::new();
    while let Some(cell) = target_cell(&colors) {
        let chosen = cell[0];
        let mut next = individualize(&colors, chosen);
        let trace = g.refine(&mut next);
        levels.push(Level {
            colors,
            cell,
            chosen,
            trace,
        });
        colors = next;
    }
    let mut s = Searcher {
        g,
        levels,
        first_leaf: colors,
        nodes: 0,
        budget: budget.max_nodes,
        exhausted: false,
    };

    let mut uf: Vec<usize> = (0..g.num_vertices()).collect();
    let mut perms: Vec<Vec<u32>> = Vec::new();
    'levels: for i in (0..s.levels.len()).rev() {
        let cell = s.levels[i].cell.clone();
        let chosen = s.levels[i].chosen;
        for &w in &cell[1..] {
            if find(&mut uf, w) == find(&mut uf, chosen) {
                continue;
            }
            if s.nodes >= s.budget {
                s.exhausted = true;
                break 'levels;
            }
            s.nodes += 1;
            let mut next = individualize(&s.levels[i].colors, w);
            if g.refine(&mut next) != s.levels[i].trace {
                continue;
            }
            if let Some(p) = s.descend(i + 1, &next) {
                for (v, &pv) in p.iter().enumerate() {
                    let (a, b) = (find(&mut uf, v), find(&mut uf, pv as usize));
                    uf[a] = b;
                }
                perms.push(p);
            }
            if s.exhausted {
                break 'levels;
            }
        }
    }

    let generators = perms
        .into_iter()
        .map(|p| {
            let n = g.n_vars();
            let lit = LitPerm::from_positive_images(n, |v: Var| {
                g.vertex_literal(p[g.literal_vertex(v.pos())] as usize)
                    .expect("literal vertices map to literal vertices")
            });
            SymGenerator::new(lit)
        })
        .filter(|gen| !gen.perm.is_identity())
        .collect();
    GeneratorSet {
        generators,
        complete: !s.exhausted,
        nodes: s.nodes,
    }
}

/// Builds the graph, searches it, and keeps only generators that pass the
/// direct check against the formula.
pub fn find_automorphisms(f: &DqbfFormula, budget: &SearchBudget) -> GeneratorSet {
    let g = build_symmetry_graph(f);
    let mut set = find_generators(&g, budget);
    set.generators.retain(|gen| match verify_symmetry(f, &gen.perm) {
        Ok(()) => true,
        Err(e) => {
            log::warn!("dropping generator {gen}: {e:?}");
            false
        }
    });
    if !set.complete {
        log::warn!("symmetry search budget exhausted after {} nodes", set.nodes);
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::example_formula;

    fn gens(f: &DqbfFormula) -> Vec<String> {
        find_automorphisms(f, &SearchBudget::default())
            .generators
            .iter()
            .map(|g| g.to_string())
            .collect()
    }

    #[test]
    fn swap_example() {
        let f = DqbfFormula::from_dimacs(&[1], &[(2, &[1]), (3, &[1])], &[&[2, 1], &[3, 1]]).unwrap();
        assert_eq!(gens(&f), vec!["( 2 3 ) ( -2 -3 )"]);
    }

    #[test]
    fn example_and_single_clause_have_none() {
        assert!(gens(&example_formula()).is_empty());
        let f = DqbfFormula::from_dimacs(&[], &[(1, &[])], &[&[1]]).unwrap();
        assert!(gens(&f).is_empty());
    }

    #[test]
    fn group_order_of_three_symmetric_variables() {
        // (y1)(y2)(y3) with equal dependencies: the symmetric group S3
        let f = DqbfFormula::from_dimacs(&[], &[(1, &[]), (2, &[]), (3, &[])], &[&[1], &[2], &[3]])
            .unwrap();
        let set = find_automorphisms(&f, &SearchBudget::default());
        assert!(set.complete);
        assert_eq!(set.generators.len(), 2);
        for g in &set.generators {
            assert_eq!(verify_symmetry(&f, &g.perm), Ok(()));
        }
    }

    #[test]
    fn phase_symmetry() {
        // (y ∨ x)(¬y ∨ x): flipping y is a symmetry
        let f = DqbfFormula::from_dimacs(&[1], &[(2, &[1])], &[&[2, 1], &[-2, 1]]).unwrap();
        assert_eq!(gens(&f), vec!["( 2 -2 )"]);
    }

    #[test]
    fn tiny_budget_is_flagged() {
        let f = DqbfFormula::from_dimacs(&[], &[(1, &[]), (2, &[]), (3, &[])], &[&[1], &[2], &[3]])
            .unwrap();
        let set = find_automorphisms(&f, &SearchBudget { max_nodes: 0 });
        assert!(!set.complete);
    }
}
