//! Polynomial detection of single-variable (E_1) autarkies.
//!
//! For an existential `y`, every non-tautological clause containing `y`
//! (resp. `-y`) demands `f(σ) = 1` (resp. 0) on the cube over `D(y)` that
//! falsifies the clause's universal literals inside `D(y)`. Some `f` over
//! `D(y)` satisfies all demands iff no positive cube meets a negative cube.

use crate::model::{DqbfFormula, Lit, Var};
use crate::oracle::{Autarky, BoolFunc};
use crate::par::Exec;

/// Region of `D(var)` on which the function must equal `polarity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcingRegion {
    pub var: Var,
    pub polarity: bool,
    pub cube: Vec<Lit>,
    pub clause: usize,
}

/// Cube as two bitsets over positions in `D(y)`: variables fixed to 1, to 0.
struct Bits {
    ones: Vec<u64>,
    zeros: Vec<u64>,
}

impl Bits {
    fn meets(&self, other: &Bits) -> bool {
        self.ones
            .iter()
            .zip(&other.zeros)
            .chain(self.zeros.iter().zip(&other.ones))
            .all(|(a, b)| a & b == 0)
    }
}

/// Clause indices containing `y` positively and negatively, for every
/// variable, skipping tautological clauses.
pub(crate) fn occurrence_lists(f: &DqbfFormula) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut occ = vec![(Vec::new(), Vec::new()); f.n_declared() as usize + 1];
    for (i, c) in f.matrix().iter().enumerate() {
        if c.is_tautological() {
            continue;
        }
        for l in c.lits() {
            let entry = &mut occ[l.var().index()];
            if l.is_positive() {
                entry.0.push(i);
            } else {
                entry.1.push(i);
            }
        }
    }
    occ
}

/// Forcing regions of `y`, positive ones first.
pub fn forcing_regions(f: &DqbfFormula, y: Var) -> Vec<ForcingRegion> {
    let occ = occurrence_lists(f);
    let (pos, neg) = &occ[y.index()];
    let d = f.prefix().deps(y);
    pos.iter()
        .map(|&c| (c, true))
        .chain(neg.iter().map(|&c| (c, false)))
        .map(|(c, polarity)| ForcingRegion {
            var: y,
            polarity,
            cube: f
                .clause(c)
                .lits()
                .iter()
                .filter(|l| d.binary_search(&l.var()).is_ok())
                .map(|&l| !l)
                .collect(),
            clause: c,
        })
        .collect()
}

fn region_bits(f: &DqbfFormula, d: &[Var], clause: usize) -> Bits {
    let words = d.len().div_ceil(64).max(1);
    let mut b = Bits {
        ones: vec![0; words],
        zeros: vec![0; words],
    };
    for l in f.clause(clause).lits() {
        if let Ok(i) = d.binary_search(&l.var()) {
            // the cube falsifies l
            let target = if l.is_positive() {
                &mut b.zeros
            } else {
                &mut b.ones
            };
            target[i / 64] |= 1 << (i % 64);
        }
    }
    b
}

fn drop_subsumed(mut cubes: Vec<Vec<Lit>>) -> Vec<Vec<Lit>> {
    cubes.sort_by_key(Vec::len);
    cubes.dedup();
    let mut kept: Vec<Vec<Lit>> = Vec::with_capacity(cubes.len());
    for c in cubes {
        let subsumed = kept
            .iter()
            .any(|k| k.iter().all(|l| c.binary_search(l).is_ok()));
        if !subsumed {
            kept.push(c);
        }
    }
    kept
}

fn e1_function_with(
    f: &DqbfFormula,
    y: Var,
    occ: &[(Vec<usize>, Vec<usize>)],
) -> Option<BoolFunc> {
    let (pos, neg) = &occ[y.index()];
    let d = f.prefix().deps(y);
    let pos_bits: Vec<Bits> = pos.iter().map(|&c| region_bits(f, d, c)).collect();
    let neg_bits: Vec<Bits> = neg.iter().map(|&c| region_bits(f, d, c)).collect();
    if pos_bits.iter().any(|p| neg_bits.iter().any(|n| p.meets(n))) {
        return None;
    }
    let cubes: Vec<Vec<Lit>> = pos
        .iter()
        .map(|&c| {
            f.clause(c)
                .lits()
                .iter()
                .filter(|l| d.binary_search(&l.var()).is_ok())
                .map(|&l| !l)
                .collect()
        })
        .collect();
    Some(BoolFunc::new(d.to_vec(), drop_subsumed(cubes)).expect("cubes lie in D(y)"))
}

/// The E_1 function for `y` (union of its positive regions), if `y` occurs
/// in the matrix and its positive and negative regions are disjoint.
pub fn e1_function(f: &DqbfFormula, y: Var) -> Option<BoolFunc> {
    let occ = f.occurrence_counts();
    if occ[y.index()] == 0 || !f.prefix().is_existential(y) {
        return None;
    }
    e1_function_with(f, y, &occurrence_lists(f))
}

/// Lowest-index existential admitting a single-variable autarky.
pub fn find_e1_autarky(f: &DqbfFormula) -> Option<Autarky> {
    find_e1_autarky_in(f, &f.occurring_existentials(), Exec::default())
}

/// First variable of `order` (all must occur in `f`) with an E_1 autarky.
pub fn find_e1_autarky_in(f: &DqbfFormula, order: &[Var], exec: Exec) -> Option<Autarky> {
    let occ = occurrence_lists(f);
    let occurs = f.occurrence_counts();
    exec.find_map_first(order, |&y| {
        if occurs[y.index()] == 0 {
            return None;
        }
        e1_function_with(f, y, &occ).map(|func| Autarky::single(y, func))
    })
}
