use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use crate::model::{Lit, Var};

use super::OracleError;

/// Largest domain for which a truth table is materialized.
pub const TABLE_CAP: usize = 16;

/// Truth table over a domain; bit `i` of a row index is the value of the
/// `i`-th domain variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    arity: usize,
    bits: Vec<u64>,
}

impl TruthTable {
    pub fn from_fn(arity: usize, mut f: impl FnMut(usize) -> bool) -> TruthTable {
        let rows = 1usize << arity;
        let mut bits = vec![0u64; rows.div_ceil(64)];
        for r in 0..rows {
            if f(r) {
                bits[r / 64] |= 1 << (r % 64);
            }
        }
        TruthTable { arity, bits }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rows(&self) -> usize {
        1 << self.arity
    }

    pub fn get(&self, row: usize) -> bool {
        self.bits[row / 64] >> (row % 64) & 1 == 1
    }
}

/// A Boolean function over a set of universal variables, stored as a cover
/// of subcubes: `f(σ) = 1` iff `σ` extends some cube. The truth table is a
/// lazily built view for domains up to [`TABLE_CAP`] variables.
#[derive(Clone)]
pub struct BoolFunc {
    domain: Vec<Var>,
    cover: Vec<Vec<Lit>>,
    table: OnceLock<Option<TruthTable>>,
}

impl BoolFunc {
    /// Normalizes the cover: sorted cubes, no duplicates, contradictory cubes
    /// dropped. Fails if a cube mentions a variable outside `domain`.
    pub fn new(mut domain: Vec<Var>, cover: Vec<Vec<Lit>>) -> Result<BoolFunc, OracleError> {
        domain.sort_unstable();
        domain.dedup();
        let mut cubes = Vec::with_capacity(cover.len());
        for mut cube in cover {
            cube.sort_unstable();
            cube.dedup();
            if let Some(l) = cube.iter().find(|l| domain.binary_search(&l.var()).is_err()) {
                return Err(OracleError::CubeOutsideDomain(l.var()));
            }
            if cube.windows(2).any(|w| w[1] == !w[0]) {
                continue;
            }
            cubes.push(cube);
        }
        cubes.sort();
        cubes.dedup();
        if cubes.first().is_some_and(Vec::is_empty) {
            cubes.truncate(1);
        }
        Ok(BoolFunc {
            domain,
            cover: cubes,
            table: OnceLock::new(),
        })
    }

    pub fn constant(value: bool) -> BoolFunc {
        BoolFunc::constant_over(Vec::new(), value)
    }

    pub fn constant_over(domain: Vec<Var>, value: bool) -> BoolFunc {
        let cover = if value { vec![Vec::new()] } else { Vec::new() };
        BoolFunc::new(domain, cover).expect("constant cover is in domain")
    }

    pub fn literal(lit: Lit) -> BoolFunc {
        BoolFunc::new(vec![lit.var()], vec![vec![lit]]).expect("literal is in domain")
    }

    /// Minterm cover of a truth table given as a row predicate.
    pub fn from_rows(domain: Vec<Var>, f: impl Fn(usize) -> bool) -> BoolFunc {
        let mut domain = domain;
        domain.sort_unstable();
        domain.dedup();
        let n = domain.len();
        let cover = (0..1usize << n)
            .filter(|&r| f(r))
            .map(|r| {
                domain
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| Lit::new(v, r >> i & 1 == 1))
                    .collect()
            })
            .collect();
        BoolFunc::new(domain, cover).expect("minterms are in domain")
    }

    pub fn domain(&self) -> &[Var] {
        &self.domain
    }

    pub fn cover(&self) -> &[Vec<Lit>] {
        &self.cover
    }

    pub fn is_const_false(&self) -> bool {
        self.cover.is_empty()
    }

    pub fn is_const_true(&self) -> bool {
        self.cover.first().is_some_and(Vec::is_empty)
    }

    /// Evaluates the cover under `value`, which must be defined on the
    /// variables the cover mentions.
    pub fn eval(&self, value: impl Fn(Var) -> bool) -> bool {
        self.cover
            .iter()
            .any(|cube| cube.iter().all(|l| l.eval(value(l.var()))))
    }

    /// Evaluates at a row index over the domain (bit `i` = `domain[i]`).
    pub fn eval_row(&self, row: usize) -> bool {
        self.eval(|v| {
            let i = self.domain.binary_search(&v).expect("cube var in domain");
            row >> i & 1 == 1
        })
    }

    /// Materialized truth table, `None` when the domain exceeds [`TABLE_CAP`].
    pub fn table(&self) -> Option<&TruthTable> {
        self.table
            .get_or_init(|| {
                (self.domain.len() <= TABLE_CAP)
                    .then(|| TruthTable::from_fn(self.domain.len(), |r| self.eval_row(r)))
            })
            .as_ref()
    }

    /// Variables whose flip changes the function value at some point.
    pub fn essential_vars(&self) -> Result<Vec<Var>, OracleError> {
        let table = self.table().ok_or(OracleError::DomainTooLarge {
            size: self.domain.len(),
            cap: TABLE_CAP,
        })?;
        Ok(self
            .domain
            .iter()
            .enumerate()
            .filter(|&(i, _)| {
                (0..table.rows())
                    .filter(|r| r >> i & 1 == 0)
                    .any(|r| table.get(r) != table.get(r | 1 << i))
            })
            .map(|(_, &v)| v)
            .collect())
    }

    /// Pointwise equality over the union of both domains.
    pub fn equivalent(&self, other: &BoolFunc) -> bool {
        let mut vars: Vec<Var> = self.domain.iter().chain(&other.domain).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        assert!(vars.len() <= 24, "equivalence check over too many variables");
        (0usize..1 << vars.len()).all(|row| {
            let value = |v: Var| row >> vars.binary_search(&v).unwrap() & 1 == 1;
            self.eval(value) == other.eval(value)
        })
    }
}

impl PartialEq for BoolFunc {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.cover == other.cover
    }
}

impl Eq for BoolFunc {}

impl Hash for BoolFunc {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.domain.hash(state);
        self.cover.hash(state);
    }
}

impl fmt::Debug for BoolFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFunc({self})")
    }
}

impl fmt::Display for BoolFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_const_true() {
            return write!(f, "1");
        }
        if self.is_const_false() {
            return write!(f, "0");
        }
        let cubes: Vec<String> = self
            .cover
            .iter()
            .map(|c| c.iter().map(Lit::to_string).collect::<Vec<_>>().join("&"))
            .collect();
        write!(f, "{}", cubes.join(" | "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(i: u32) -> Var {
        Var::new(i)
    }

    #[test]
    fn constants_have_no_essential_vars() {
        let f = BoolFunc::constant_over(vec![v(1), v(2)], false);
        assert!(f.essential_vars().unwrap().is_empty());
        assert!(BoolFunc::constant(true).essential_vars().unwrap().is_empty());
    }

    #[test]
    fn literal_is_essential() {
        let f = BoolFunc::literal(v(1).pos());
        assert_eq!(f.essential_vars().unwrap(), vec![v(1)]);
    }

    #[test]
    fn xor_over_larger_domain() {
        // x1 xor x2 over {x1, x2, x3}
        let f = BoolFunc::new(
            vec![v(1), v(2), v(3)],
            vec![vec![v(1).pos(), v(2).neg()], vec![v(1).neg(), v(2).pos()]],
        )
        .unwrap();
        assert_eq!(f.essential_vars().unwrap(), vec![v(1), v(2)]);
    }

    #[test]
    fn oversized_domain_is_rejected() {
        let dom: Vec<Var> = (1..=17).map(v).collect();
        let f = BoolFunc::constant_over(dom, true);
        assert!(f.table().is_none());
        assert!(matches!(
            f.essential_vars(),
            Err(OracleError::DomainTooLarge { size: 17, .. })
        ));
    }

    #[test]
    fn cube_outside_domain() {
        assert!(BoolFunc::new(vec![v(1)], vec![vec![v(2).pos()]]).is_err());
    }

    #[test]
    fn contradictory_cubes_dropped() {
        let f = BoolFunc::new(vec![v(1)], vec![vec![v(1).pos(), v(1).neg()]]).unwrap();
        assert!(f.is_const_false());
    }

    fn func_strategy() -> impl Strategy<Value = BoolFunc> {
        (0usize..=5).prop_flat_map(|n| {
            let lit = (1..=n.max(1) as u32, any::<bool>()).prop_map(|(i, s)| Lit::new(Var::new(i), s));
            let cube = prop::collection::vec(lit, 0..=n);
            prop::collection::vec(cube, 0..6).prop_map(move |cover| {
                let dom: Vec<Var> = (1..=n.max(1) as u32).map(Var::new).collect();
                BoolFunc::new(dom, cover).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn cover_agrees_with_table(f in func_strategy()) {
            let t = f.table().unwrap().clone();
            for r in 0..t.rows() {
                prop_assert_eq!(t.get(r), f.eval_row(r));
            }
            let g = BoolFunc::from_rows(f.domain().to_vec(), |r| t.get(r));
            prop_assert!(f.equivalent(&g));
        }
    }
}
