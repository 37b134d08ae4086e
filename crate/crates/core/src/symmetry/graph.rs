use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use crate::model::{DqbfFormula, Lit, Quant, Var};

/// Vertex-colored undirected graph whose automorphisms are the literal
/// permutations preserving clause structure, quantifier kinds and
/// dependency sets.
///
/// Vertices `0..2n` are literals (vertex `code - 2` for literal code
/// `code`), followed by one vertex per clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    n_vars: u32,
    n_clauses: usize,
    colors: Vec<u32>,
    adj: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum ColorKey {
    Clause,
    /// Dependency sets containing the universal.
    Universal(Vec<Vec<Var>>),
    /// The existential's dependency set.
    Existential(Vec<Var>),
    Unbound,
}

pub fn build_symmetry_graph(f: &DqbfFormula) -> ColoredGraph {
    let n = f.n_declared();
    let prefix = f.prefix();
    let lit_vertices = 2 * n as usize;
    let total = lit_vertices + f.num_clauses();

    let dep_sets: BTreeSet<&[Var]> = prefix.existentials().map(|y| prefix.deps(y)).collect();
    let key_of = |v: Var| match prefix.kind(v) {
        Some(Quant::Universal) => ColorKey::Universal(
            dep_sets
                .iter()
                .filter(|d| d.binary_search(&v).is_ok())
                .map(|d| d.to_vec())
                .collect(),
        ),
        Some(Quant::Existential) => ColorKey::Existential(prefix.deps(v).to_vec()),
        None => ColorKey::Unbound,
    };
    let mut keys: Vec<ColorKey> = (1..=n).map(|v| key_of(Var::new(v))).collect();
    if f.num_clauses() > 0 {
        keys.push(ColorKey::Clause);
    }
    let mut distinct = keys.clone();
    distinct.sort();
    distinct.dedup();
    let color = |k: &ColorKey| distinct.binary_search(k).unwrap() as u32;

    let mut colors = vec![0; total];
    for v in 1..=n {
        let c = color(&keys[v as usize - 1]);
        colors[2 * (v as usize - 1)] = c;
        colors[2 * (v as usize - 1) + 1] = c;
    }
    let clause_color = if f.num_clauses() > 0 {
        color(&ColorKey::Clause)
    } else {
        0
    };
    let mut adj = vec![Vec::new(); total];
    for v in 0..n as usize {
        adj[2 * v].push(2 * v as u32 + 1);
        adj[2 * v + 1].push(2 * v as u32);
    }
    for (i, c) in f.matrix().iter().enumerate() {
        let cv = lit_vertices + i;
        colors[cv] = clause_color;
        for &l in c.lits() {
            let lv = l.code() - 2;
            adj[cv].push(lv as u32);
            adj[lv].push(cv as u32);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    ColoredGraph {
        n_vars: n,
        n_clauses: f.num_clauses(),
        colors,
        adj,
    }
}

impl ColoredGraph {
    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_literal_vertices(&self) -> usize {
        2 * self.n_vars as usize
    }

    pub fn num_clause_vertices(&self) -> usize {
        self.n_clauses
    }

    pub fn n_vars(&self) -> u32 {
        self.n_vars
    }

    pub fn literal_vertex(&self, l: Lit) -> usize {
        l.code() - 2
    }

    pub fn vertex_literal(&self, v: usize) -> Option<Lit> {
        (v < self.num_literal_vertices()).then(|| Lit::from_code(v + 2))
    }

    pub fn clause_vertex(&self, idx: usize) -> usize {
        self.num_literal_vertices() + idx
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn initial_colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&(b as u32)).is_ok()
    }

    /// Whether `perm` (vertex -> vertex) preserves colors and edges.
    pub fn is_automorphism(&self, perm: &[u32]) -> bool {
        (0..self.num_vertices()).all(|v| {
            let pv = perm[v] as usize;
            self.colors[v] == self.colors[pv]
                && self.adj[v].len() == self.adj[pv].len()
                && self.adj[v]
                    .iter()
                    .all(|&w| self.has_edge(pv, perm[w as usize] as usize))
        })
    }

    /// Equitable refinement: splits color classes by the multiset of
    /// neighbor colors until stable. Colors stay canonical (numbered by
    /// sorted signature), so isomorphic inputs give corresponding outputs.
    /// Returns a hash of the refinement trace.
    pub(crate) fn refine(&self, colors: &mut [u32]) -> u64 {
        let n = colors.len();
        let mut hasher = DefaultHasher::new();
        let mut k = count_colors(colors);
        let mut order: Vec<usize> = (0..n).collect();
        loop {
            let sigs: Vec<(u32, Vec<u32>)> = (0..n)
                .map(|v| {
                    let mut nb: Vec<u32> = self.adj[v].iter().map(|&w| colors[w as usize]).collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]));
            let mut next = 0u32;
            for (i, &v) in order.iter().enumerate() {
                if i > 0 && sigs[v] != sigs[order[i - 1]] {
                    next += 1;
                    sigs[order[i - 1]].hash(&mut hasher);
                    i.hash(&mut hasher);
                }
                colors[v] = next;
            }
            let new_k = if n == 0 { 0 } else { next as usize + 1 };
            new_k.hash(&mut hasher);
            if new_k == k {
                return hasher.finish();
            }
            k = new_k;
        }
    }
}

fn count_colors(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Gives `v` its own color just below the rest of its class, keeping colors
/// canonical.
pub(crate) fn individualize(colors: &[u32], v: usize) -> Vec<u32> {
    let cv = colors[v];
    colors
        .iter()
        .enumerate()
        .map(|(w, &c)| {
            if c > cv || (c == cv && w != v) {
                c + 1
            } else {
                c
            }
        })
        .collect()
}

/// Smallest color with more than one vertex, and its vertices.
pub(crate) fn target_cell(colors: &[u32]) -> Option<Vec<usize>> {
    let mut counts = vec![0usize; colors.len()];
    for &c in colors {
        counts[c as usize] += 1;
    }
    let c = counts.iter().position(|&k| k > 1)? as u32;
    Some((0..colors.len()).filter(|&v| colors[v] == c).collect())
}
