//! E_k autarkies: at most `k` existentials assigned, functions unrestricted
//! over the full dependency sets. `k = 1` is the polynomial E_1 check; for
//! `k = 2` coupled pairs are searched with one SAT call per pair over both
//! truth tables.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::model::{DqbfFormula, Var};
use crate::oracle::{is_autarky_with, Autarky, BoolFunc, TautologyMethod};
use crate::sat::{CnfInstance, SatLimits, SatStatus};

use super::e1::find_e1_autarky_in;
use super::{AutarkySystemConfig, Detection, EngineError};

fn shuffled(mut vars: Vec<Var>, rng: Option<&mut ChaCha8Rng>) -> Vec<Var> {
    if let Some(rng) = rng {
        vars.shuffle(rng);
    }
    vars
}

/// Pairs of occurring existentials that share a clause. A pair sharing no
/// clause splits into two single-variable autarkies.
fn coupled_pairs(f: &DqbfFormula) -> Vec<(Var, Var)> {
    let prefix = f.prefix();
    let mut pairs = BTreeSet::new();
    for c in f.matrix() {
        if c.is_tautological() {
            continue;
        }
        let ex: Vec<Var> = c
            .lits()
            .iter()
            .map(|l| l.var())
            .filter(|&v| prefix.is_existential(v))
            .collect();
        for (i, &a) in ex.iter().enumerate() {
            for &b in &ex[i + 1..] {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    pairs.into_iter().collect()
}

enum PairResult {
    Found(Autarky),
    Absent,
    Skipped,
}

fn solve_pair(
    f: &DqbfFormula,
    y: Var,
    z: Var,
    cfg: &AutarkySystemConfig,
    limits: &SatLimits,
) -> Result<PairResult, EngineError> {
    let prefix = f.prefix();
    let (dy, dz) = (prefix.deps(y), prefix.deps(z));
    if dy.len() >= 62 || dz.len() >= 62 || (1usize << dy.len()) + (1usize << dz.len()) > cfg.e2_table_bound
    {
        return Ok(PairResult::Skipped);
    }
    let mut cnf = CnfInstance::new();
    let ty: Vec<i32> = (0..1usize << dy.len()).map(|_| cnf.new_var()).collect();
    let tz: Vec<i32> = (0..1usize << dz.len()).map(|_| cnf.new_var()).collect();
    let mut scope: Vec<Var> = dy.iter().chain(dz).copied().collect();
    scope.sort_unstable();
    scope.dedup();

    let row_of = |d: &[Var], value: &dyn Fn(Var) -> bool| {
        d.iter()
            .enumerate()
            .fold(0usize, |acc, (i, &u)| acc | usize::from(value(u)) << i)
    };

    for c in f.matrix() {
        if c.is_tautological() || !(c.mentions(y) || c.mentions(z)) {
            continue;
        }
        let fixed: Vec<(Var, bool)> = c
            .lits()
            .iter()
            .filter(|l| scope.binary_search(&l.var()).is_ok())
            .map(|l| (l.var(), !l.is_positive()))
            .collect();
        let free: Vec<Var> = scope
            .iter()
            .copied()
            .filter(|v| !fixed.iter().any(|(f, _)| f == v))
            .collect();
        if free.len() > cfg.direct_enum_cap {
            return Ok(PairResult::Skipped);
        }
        for sigma in 0u64..1 << free.len() {
            let value = |v: Var| match fixed.iter().find(|(f, _)| *f == v) {
                Some(&(_, b)) => b,
                None => sigma >> free.iter().position(|&w| w == v).unwrap() & 1 == 1,
            };
            let mut clause = Vec::new();
            for l in c.lits() {
                let sign = if l.is_positive() { 1 } else { -1 };
                if l.var() == y {
                    clause.push(sign * ty[row_of(dy, &value)]);
                } else if l.var() == z {
                    clause.push(sign * tz[row_of(dz, &value)]);
                }
            }
            cnf.add_clause(clause);
        }
    }
    let result = cfg.sat_backend.solve(&cnf, limits)?;
    match result.status {
        SatStatus::Unsat => Ok(PairResult::Absent),
        SatStatus::Unknown => Ok(PairResult::Skipped),
        SatStatus::Sat => {
            let fy = BoolFunc::from_rows(dy.to_vec(), |r| result.value(ty[r]));
            let fz = BoolFunc::from_rows(dz.to_vec(), |r| result.value(tz[r]));
            let a: Autarky = [(y, fy), (z, fz)].into_iter().collect();
            if let Err(e) = is_autarky_with(f, &a, TautologyMethod::Auto) {
                log::error!("E_2 decoded assignment rejected: {e}");
                return Err(EngineError::DecodedNotAutarky(e.to_string()));
            }
            Ok(PairResult::Found(a))
        }
    }
}

/// Searches for an autarky assigning at most `k` existentials.
pub fn find_ek_autarky(
    f: &DqbfFormula,
    k: u8,
    cfg: &AutarkySystemConfig,
    mut rng: Option<&mut ChaCha8Rng>,
    seed: u64,
) -> Result<Detection, EngineError> {
    let order = shuffled(f.occurring_existentials(), rng.as_deref_mut());
    if let Some(a) = find_e1_autarky_in(f, &order, cfg.exec) {
        return Ok(Detection::Found(a));
    }
    if k < 2 {
        return Ok(Detection::Absent);
    }
    let mut pairs = coupled_pairs(f);
    if let Some(rng) = rng {
        pairs.shuffle(rng);
    }
    let limits = SatLimits {
        seed,
        ..cfg.sat_limits
    };
    let mut incomplete = false;
    for (y, z) in pairs {
        match solve_pair(f, y, z, cfg, &limits)? {
            PairResult::Found(a) => return Ok(Detection::Found(a)),
            PairResult::Absent => {}
            PairResult::Skipped => {
                log::warn!("E_2 pair ({y}, {z}) skipped: tables exceed the configured bound");
                incomplete = true;
            }
        }
    }
    Ok(if incomplete {
        Detection::Incomplete
    } else {
        Detection::Absent
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::example_formula;
    use crate::oracle::{enumerate_autarkies, OracleBudget};

    #[test]
    fn pair_only_autarky() {
        // y1 = y2 is forced jointly: no single-variable autarky, but the pair
        // y1 = y2 = x works on the first two clauses, the third only
        // mentions x and y3.
        let f = DqbfFormula::from_dimacs(
            &[1],
            &[(2, &[1]), (3, &[1]), (4, &[1])],
            &[&[2, -3], &[-2, 3], &[2, 1, 4], &[-2, -1, -4]],
        )
        .unwrap();
        let cfg = AutarkySystemConfig::all_systems();
        let e1 = find_ek_autarky(&f, 1, &cfg, None, 0).unwrap();
        let oracle1 = enumerate_autarkies(&f, 1, &OracleBudget::default()).unwrap();
        assert_eq!(matches!(e1, Detection::Found(_)), !oracle1.is_empty());
        let e2 = find_ek_autarky(&f, 2, &cfg, None, 0).unwrap();
        let oracle2 = enumerate_autarkies(&f, 2, &OracleBudget::default()).unwrap();
        assert_eq!(matches!(e2, Detection::Found(_)), !oracle2.is_empty());
    }

    #[test]
    fn kernel_absent() {
        let f = example_formula();
        let kernel = f.with_matrix(f.matrix()[..2].to_vec());
        let cfg = AutarkySystemConfig::all_systems();
        assert_eq!(find_ek_autarky(&kernel, 2, &cfg, None, 0).unwrap(), Detection::Absent);
    }

    #[test]
    fn bound_reports_incomplete() {
        let f = DqbfFormula::from_dimacs(&[1], &[(2, &[1]), (3, &[1])], &[&[2, 3], &[-2, -3], &[2, -3, 1], &[-2, 3, -1]])
            .unwrap();
        let cfg = AutarkySystemConfig {
            e2_table_bound: 2,
            ..AutarkySystemConfig::all_systems()
        };
        let r = find_ek_autarky(&f, 2, &cfg, None, 0).unwrap();
        let exact = enumerate_autarkies(&f, 2, &OracleBudget::default()).unwrap();
        if exact.is_empty() {
            assert_eq!(r, Detection::Incomplete);
        }
    }
}
