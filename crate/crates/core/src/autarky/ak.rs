//! SAT encodings for A_k autarkies (functions with at most `k` essential
//! universals).
//!
//! Every occurring existential gets one selector per candidate function plus
//! an "unassigned" selector, constrained to exactly one. Two clause
//! encodings are available:
//!
//! * witness-based (`k <= 1`): a clause touched by some assigned variable
//!   must realize one of its compiled tautology witnesses;
//! * direct (any `k`): for every assignment of the universals the clause
//!   depends on, some substituted literal must evaluate to true.

use std::collections::{BTreeMap, HashMap};

use crate::model::{DqbfFormula, Lit, Var};
use crate::oracle::{is_autarky_with, Autarky, BoolFunc, TautologyMethod};
use crate::sat::{CnfInstance, SatResult, SatStatus};
use crate::symmetry::{clause_orbits, find_automorphisms, SearchBudget};

use super::witness::{compile_tautology_witnesses, compile_with_symmetry, WitnessFunc, WitnessMap};
use super::{AutarkySystemConfig, Detection, EngineError};

/// Truth tables over an ordered pair `(x, z)` (row = x + 2z) that depend on
/// both variables.
const TWO_VAR_TABLES: [u8; 10] = [
    0b0001, 0b0010, 0b0100, 0b1000, 0b0110, 0b1001, 0b0111, 0b1011, 0b1101, 0b1110,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AkClauseEncoding {
    Witness,
    Direct,
}

#[derive(Debug, Clone)]
struct Selector {
    sat_var: i32,
    func: BoolFunc,
    witness: Option<WitnessFunc>,
}

/// A_k encoding of a formula. Selector numbering is deterministic in the
/// formula, `k` and the clause encoding.
#[derive(Debug, Clone)]
pub struct AkEncoding {
    pub cnf: CnfInstance,
    pub k: u8,
    unassigned: BTreeMap<Var, i32>,
    options: BTreeMap<Var, Vec<Selector>>,
}

fn candidate_functions(deps: &[Var], k: u8) -> Vec<(BoolFunc, Option<WitnessFunc>)> {
    let mut out = vec![
        (BoolFunc::constant(false), Some(WitnessFunc::Const(false))),
        (BoolFunc::constant(true), Some(WitnessFunc::Const(true))),
    ];
    if k >= 1 {
        for &x in deps {
            for positive in [true, false] {
                let l = Lit::new(x, positive);
                out.push((BoolFunc::literal(l), Some(WitnessFunc::Lit(l))));
            }
        }
    }
    if k >= 2 {
        for (i, &x) in deps.iter().enumerate() {
            for &z in &deps[i + 1..] {
                for t in TWO_VAR_TABLES {
                    out.push((BoolFunc::from_rows(vec![x, z], |row| t >> row & 1 == 1), None));
                }
            }
        }
    }
    out
}

impl AkEncoding {
    /// Selector CNF with the exactly-one and non-triviality constraints; no
    /// clause constraints yet. `None` when no existential occurs.
    fn skeleton(f: &DqbfFormula, k: u8) -> Option<AkEncoding> {
        let occurring = f.occurring_existentials();
        if occurring.is_empty() {
            return None;
        }
        let mut cnf = CnfInstance::new();
        let mut unassigned = BTreeMap::new();
        let mut options = BTreeMap::new();
        for &y in &occurring {
            let u = cnf.new_var();
            let sels: Vec<Selector> = candidate_functions(f.prefix().deps(y), k)
                .into_iter()
                .map(|(func, witness)| Selector {
                    sat_var: cnf.new_var(),
                    func,
                    witness,
                })
                .collect();
            let mut group = vec![u];
            group.extend(sels.iter().map(|s| s.sat_var));
            cnf.add_exactly_one(&group);
            unassigned.insert(y, u);
            options.insert(y, sels);
        }
        cnf.add_clause(unassigned.values().map(|&u| -u));
        Some(AkEncoding {
            cnf,
            k,
            unassigned,
            options,
        })
    }

    /// Witness-based encoding for `k <= 1`.
    pub fn witness_based(f: &DqbfFormula, k: u8, witnesses: &WitnessMap) -> Option<AkEncoding> {
        assert!(k <= 1, "witness encoding covers k <= 1");
        let mut enc = AkEncoding::skeleton(f, k)?;
        let lookup: HashMap<(Var, WitnessFunc), i32> = enc
            .options
            .iter()
            .flat_map(|(&y, sels)| {
                sels.iter()
                    .filter_map(move |s| s.witness.map(|w| ((y, w), s.sat_var)))
            })
            .collect();
        for (&idx, ws) in witnesses {
            let clause = f.clause(idx);
            if ws.iter().any(|w| w.choices.is_empty()) {
                continue;
            }
            let mut realized = Vec::with_capacity(ws.len());
            for w in ws {
                let sels: Vec<i32> = w.choices.iter().map(|c| lookup[c]).collect();
                if let [s] = sels[..] {
                    realized.push(s);
                } else {
                    let aux = enc.cnf.new_var();
                    for &s in &sels {
                        enc.cnf.add_clause([-aux, s]);
                    }
                    realized.push(aux);
                }
            }
            let mut vars: Vec<Var> = clause
                .lits()
                .iter()
                .map(|l| l.var())
                .filter(|v| enc.unassigned.contains_key(v))
                .collect();
            vars.dedup();
            for y in vars {
                let mut c = vec![enc.unassigned[&y]];
                c.extend_from_slice(&realized);
                enc.cnf.add_clause(c);
            }
        }
        Some(enc)
    }

    /// Direct encoding. Fails with the offending clause when more than
    /// `enum_cap` free universals would need enumeration.
    pub fn direct(f: &DqbfFormula, k: u8, enum_cap: usize) -> Result<Option<AkEncoding>, usize> {
        let Some(mut enc) = AkEncoding::skeleton(f, k) else {
            return Ok(None);
        };
        let prefix = f.prefix();
        for (idx, clause) in f.matrix().iter().enumerate() {
            if clause.is_tautological() {
                continue;
            }
            let ex: Vec<Lit> = clause
                .lits()
                .iter()
                .copied()
                .filter(|l| enc.unassigned.contains_key(&l.var()))
                .collect();
            if ex.is_empty() {
                continue;
            }
            let mut scope: Vec<Var> = ex.iter().flat_map(|l| prefix.deps(l.var()).to_vec()).collect();
            scope.sort_unstable();
            scope.dedup();
            // universal literals of the clause inside the scope are fixed false
            let fixed: BTreeMap<Var, bool> = clause
                .lits()
                .iter()
                .filter(|l| scope.binary_search(&l.var()).is_ok())
                .map(|l| (l.var(), !l.is_positive()))
                .collect();
            let free: Vec<Var> = scope.iter().copied().filter(|v| !fixed.contains_key(v)).collect();
            if free.len() > enum_cap {
                return Err(idx);
            }
            let mut vars: Vec<Var> = ex.iter().map(|l| l.var()).collect();
            vars.dedup();
            for sigma in 0u64..1 << free.len() {
                let value = |v: Var| match fixed.get(&v) {
                    Some(&b) => b,
                    None => sigma >> free.binary_search(&v).unwrap() & 1 == 1,
                };
                let mut realized = Vec::new();
                for &l in &ex {
                    for s in &enc.options[&l.var()] {
                        if s.func.eval(value) == l.is_positive() {
                            realized.push(s.sat_var);
                        }
                    }
                }
                for &y in &vars {
                    let mut c = vec![enc.unassigned[&y]];
                    c.extend_from_slice(&realized);
                    enc.cnf.add_clause(c);
                }
            }
        }
        Ok(Some(enc))
    }

    /// Reads the chosen functions from a model.
    pub fn decode(&self, result: &SatResult) -> Autarky {
        let mut a = Autarky::new();
        for (&y, sels) in &self.options {
            if result.value(self.unassigned[&y]) {
                continue;
            }
            if let Some(s) = sels.iter().find(|s| result.value(s.sat_var)) {
                a.insert(y, s.func.clone());
            }
        }
        a
    }
}

/// Witnesses for `k <= 1`, transported along clause orbits when requested;
/// falls back to clause-wise compilation if the symmetry route fails.
pub fn witnesses_for(f: &DqbfFormula, k: u8, use_symmetry: bool) -> WitnessMap {
    if use_symmetry {
        let gens = find_automorphisms(f, &SearchBudget::default());
        let orbits = clause_orbits(f, &gens.generators);
        match compile_with_symmetry(f, &orbits, k) {
            Ok(w) => return w,
            Err(e) => log::warn!("{e}; compiling witnesses clause by clause"),
        }
    }
    compile_tautology_witnesses(f, k)
}

/// Builds the encoding configured for `k`: witness-based for `k <= 1`,
/// direct for `k = 2`.
pub fn encode_ak(
    f: &DqbfFormula,
    k: u8,
    cfg: &AutarkySystemConfig,
    how: AkClauseEncoding,
) -> Result<Option<AkEncoding>, usize> {
    match how {
        AkClauseEncoding::Witness => {
            let w = witnesses_for(f, k, cfg.use_symmetry_compilation);
            Ok(AkEncoding::witness_based(f, k, &w))
        }
        AkClauseEncoding::Direct => AkEncoding::direct(f, k, cfg.direct_enum_cap),
    }
}

/// Solves `enc` and turns the result into a detection. A decoded assignment
/// that fails the autarky check is an encoding bug and is returned as an
/// error rather than used.
pub fn solve_encoding(
    f: &DqbfFormula,
    enc: &AkEncoding,
    cfg: &AutarkySystemConfig,
    seed: u64,
) -> Result<Detection, EngineError> {
    let limits = crate::sat::SatLimits {
        seed,
        ..cfg.sat_limits
    };
    let result = cfg.sat_backend.solve(&enc.cnf, &limits)?;
    match result.status {
        SatStatus::Unsat => Ok(Detection::Absent),
        SatStatus::Unknown => {
            log::warn!("A_{} search hit the SAT limits; result incomplete", enc.k);
            Ok(Detection::Incomplete)
        }
        SatStatus::Sat => {
            let a = enc.decode(&result);
            if let Err(e) = is_autarky_with(f, &a, TautologyMethod::Auto) {
                log::error!("A_{} decoded assignment rejected: {e}", enc.k);
                return Err(EngineError::DecodedNotAutarky(e.to_string()));
            }
            if a.is_empty() {
                return Err(EngineError::DecodedNotAutarky("empty assignment".into()));
            }
            Ok(Detection::Found(a))
        }
    }
}

/// Searches for a non-trivial A_k autarky.
pub fn find_ak_autarky(
    f: &DqbfFormula,
    k: u8,
    cfg: &AutarkySystemConfig,
    seed: u64,
) -> Result<Detection, EngineError> {
    let how = if k <= 1 {
        AkClauseEncoding::Witness
    } else {
        AkClauseEncoding::Direct
    };
    match encode_ak(f, k, cfg, how) {
        Ok(None) => Ok(Detection::Absent),
        Ok(Some(enc)) => solve_encoding(f, &enc, cfg, seed),
        Err(clause) => {
            log::warn!("A_{k} skipped: clause {clause} exceeds the enumeration cap");
            Ok(Detection::Incomplete)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::example_formula;
    use crate::oracle::{enumerate_autarkies, OracleBudget};

    fn cfg() -> AutarkySystemConfig {
        AutarkySystemConfig::default()
    }

    fn kernel() -> DqbfFormula {
        let f = example_formula();
        f.with_matrix(f.matrix()[..2].to_vec())
    }

    #[test]
    fn two_var_tables_are_essential() {
        for t in TWO_VAR_TABLES {
            let func = BoolFunc::from_rows(vec![Var::new(1), Var::new(2)], |r| t >> r & 1 == 1);
            assert_eq!(func.essential_vars().unwrap().len(), 2, "{t:04b}");
        }
    }

    #[test]
    fn example_finds_autarkies() {
        for k in 0..=2 {
            let Detection::Found(a) = find_ak_autarky(&example_formula(), k, &cfg(), 0).unwrap()
            else {
                panic!("A_{k} should find an autarky");
            };
            assert!(crate::oracle::is_autarky(&example_formula(), &a));
        }
    }

    #[test]
    fn kernel_has_none() {
        for k in 0..=2 {
            assert_eq!(
                find_ak_autarky(&kernel(), k, &cfg(), 0).unwrap(),
                Detection::Absent
            );
        }
    }

    #[test]
    fn witness_and_direct_agree() {
        for f in [example_formula(), kernel()] {
            for k in 0..=1 {
                let w = encode_ak(&f, k, &cfg(), AkClauseEncoding::Witness).unwrap().unwrap();
                let d = encode_ak(&f, k, &cfg(), AkClauseEncoding::Direct).unwrap().unwrap();
                let a = solve_encoding(&f, &w, &cfg(), 0).unwrap();
                let b = solve_encoding(&f, &d, &cfg(), 0).unwrap();
                assert_eq!(matches!(a, Detection::Found(_)), matches!(b, Detection::Found(_)));
            }
        }
    }

    #[test]
    fn a0_matches_oracle_on_constants() {
        // y must copy x, so no constant autarky exists, but a literal one does
        let f = DqbfFormula::from_dimacs(&[1], &[(2, &[1])], &[&[2, -1], &[-2, 1]]).unwrap();
        assert_eq!(find_ak_autarky(&f, 0, &cfg(), 0).unwrap(), Detection::Absent);
        assert!(matches!(
            find_ak_autarky(&f, 1, &cfg(), 0).unwrap(),
            Detection::Found(_)
        ));
        assert!(!enumerate_autarkies(&f, 1, &OracleBudget::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn symmetry_route_gives_same_witnesses() {
        let f = DqbfFormula::from_dimacs(
            &[1, 2],
            &[(3, &[1]), (4, &[2])],
            &[&[3, 1], &[4, 2], &[-3, -4]],
        )
        .unwrap();
        assert_eq!(witnesses_for(&f, 1, true), compile_tautology_witnesses(&f, 1));
    }
}
