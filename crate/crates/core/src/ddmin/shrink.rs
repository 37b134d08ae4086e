use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::model::{Clause, DqbfFormula, Lit, Prefix, Var};
use crate::par::Exec;

use super::{DdminError, Interestingness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ShrinkOptions {
    /// Wall-clock budget after the initial check; `None` for unlimited.
    pub budget: Option<Duration>,
    pub exec: Exec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassStats {
    pub name: &'static str,
    pub attempts: usize,
    pub accepted: usize,
}

#[derive(Debug, Clone)]
pub struct ShrinkResult {
    pub reduced: DqbfFormula,
    pub still_interesting: bool,
    pub passes: Vec<PassStats>,
    pub budget_hit: bool,
    /// Predicate evaluations, cache hits excluded.
    pub tests_run: usize,
    pub cache_hits: usize,
}

/// Cached, budgeted predicate evaluation.
struct Tester<'a> {
    pred: &'a dyn Interestingness,
    cache: Mutex<HashMap<String, bool>>,
    deadline: Option<Instant>,
    budget_hit: AtomicBool,
    tests: AtomicUsize,
    hits: AtomicUsize,
}

impl<'a> Tester<'a> {
    fn new(pred: &'a dyn Interestingness, budget: Option<Duration>) -> Self {
        Tester {
            pred,
            cache: Mutex::new(HashMap::new()),
            deadline: budget.map(|b| Instant::now() + b),
            budget_hit: AtomicBool::new(false),
            tests: AtomicUsize::new(0),
            hits: AtomicUsize::new(0),
        }
    }

    fn out_of_budget(&self) -> bool {
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.budget_hit.store(true, Ordering::Relaxed);
        }
        self.budget_hit.load(Ordering::Relaxed)
    }

    fn test(&self, f: &DqbfFormula) -> Result<bool, DdminError> {
        if self.out_of_budget() {
            return Ok(false);
        }
        let key = f.digest();
        if let Some(&v) = self.cache.lock().unwrap().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v);
        }
        self.tests.fetch_add(1, Ordering::Relaxed);
        let v = self.pred.is_interesting(f)?;
        self.cache.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// Index of the first interesting candidate. In parallel mode all are
    /// tested; the answer is the same as the sequential scan.
    fn first_interesting(&self, cands: &[DqbfFormula], exec: Exec) -> Result<Option<usize>, DdminError> {
        if exec.is_parallel() {
            let verdicts = exec.map(cands, |c| self.test(c));
            for (i, v) in verdicts.into_iter().enumerate() {
                if v? {
                    return Ok(Some(i));
                }
            }
            return Ok(None);
        }
        for (i, c) in cands.iter().enumerate() {
            if self.test(c)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

fn chunks(len: usize, n: usize) -> Vec<std::ops::Range<usize>> {
    (0..n).map(|i| i * len / n..(i + 1) * len / n).filter(|r| !r.is_empty()).collect()
}

/// Classic ddmin over the clause sequence.
fn ddmin_pass(t: &Tester, f: &DqbfFormula, exec: Exec, history: &mut Vec<DqbfFormula>) -> Result<(DqbfFormula, PassStats), DdminError> {
    let mut stats = PassStats {
        name: "clauses",
        attempts: 0,
        accepted: 0,
    };
    let mut clauses = f.matrix().to_vec();
    let mut n = 2usize;
    while clauses.len() >= 2 && !t.out_of_budget() {
        let parts = chunks(clauses.len(), n);
        let subsets: Vec<DqbfFormula> = parts.iter().map(|r| f.with_matrix(clauses[r.clone()].to_vec())).collect();
        stats.attempts += subsets.len();
        if let Some(i) = t.first_interesting(&subsets, exec)? {
            clauses = subsets[i].matrix().to_vec();
            history.push(subsets[i].clone());
            stats.accepted += 1;
            n = 2;
            continue;
        }
        if parts.len() > 2 {
            let complements: Vec<DqbfFormula> = parts
                .iter()
                .map(|r| {
                    let m = clauses
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| !r.contains(j))
                        .map(|(_, c)| c.clone())
                        .collect();
                    f.with_matrix(m)
                })
                .collect();
            stats.attempts += complements.len();
            if let Some(i) = t.first_interesting(&complements, exec)? {
                clauses = complements[i].matrix().to_vec();
                history.push(complements[i].clone());
                stats.accepted += 1;
                n = (n - 1).max(2);
                continue;
            }
        }
        if n >= clauses.len() {
            break;
        }
        n = (2 * n).min(clauses.len());
    }
    if clauses.len() == 1 && !t.out_of_budget() {
        stats.attempts += 1;
        let empty = f.with_matrix(Vec::new());
        if t.test(&empty)? {
            clauses.clear();
            history.push(empty);
            stats.accepted += 1;
        }
    }
    Ok((f.with_matrix(clauses), stats))
}

fn literal_pass(t: &Tester, f: &DqbfFormula, history: &mut Vec<DqbfFormula>) -> Result<(DqbfFormula, PassStats), DdminError> {
    let mut stats = PassStats {
        name: "literals",
        attempts: 0,
        accepted: 0,
    };
    let mut cur = f.clone();
    for i in 0..cur.num_clauses() {
        let mut j = 0;
        // never empty a clause: an empty clause makes any instance trivially UNSAT
        while cur.clause(i).len() > 1 && j < cur.clause(i).len() {
            if t.out_of_budget() {
                return Ok((cur, stats));
            }
            let lit: Lit = cur.clause(i).lits()[j];
            let mut m = cur.matrix().to_vec();
            m[i] = m[i].without(lit);
            let cand = cur.with_matrix(m);
            stats.attempts += 1;
            if t.test(&cand)? {
                history.push(cand.clone());
                cur = cand;
                stats.accepted += 1;
            } else {
                j += 1;
            }
        }
    }
    Ok((cur, stats))
}

fn dependency_pass(t: &Tester, f: &DqbfFormula, history: &mut Vec<DqbfFormula>) -> Result<(DqbfFormula, PassStats), DdminError> {
    let mut stats = PassStats {
        name: "dependencies",
        attempts: 0,
        accepted: 0,
    };
    let mut cur = f.clone();
    let existentials: Vec<Var> = cur.prefix().existentials().collect();
    for y in existentials {
        let mut k = 0;
        while k < cur.prefix().deps(y).len() {
            if t.out_of_budget() {
                return Ok((cur, stats));
            }
            let mut deps = cur.prefix().deps(y).to_vec();
            deps.remove(k);
            let prefix = cur.prefix().with_existential(y, deps);
            let cand = cur.with_parts(prefix, cur.matrix().to_vec(), cur.n_declared());
            stats.attempts += 1;
            if t.test(&cand)? {
                history.push(cand.clone());
                cur = cand;
                stats.accepted += 1;
            } else {
                k += 1;
            }
        }
    }
    Ok((cur, stats))
}

/// Drops variables that occur in no clause (universals are kept while a
/// remaining existential depends on them) and renumbers the rest densely,
/// preserving order. `None` when nothing would change.
pub fn renumber_dense(f: &DqbfFormula) -> Option<DqbfFormula> {
    let prefix = f.prefix();
    let occ = f.occurrence_counts();
    let mut keep = vec![false; f.n_declared() as usize + 1];
    for v in 1..=f.n_declared() as usize {
        if occ[v] > 0 {
            keep[v] = true;
            let v = Var::new(v as u32);
            if prefix.is_existential(v) {
                for u in prefix.deps(v) {
                    keep[u.index()] = true;
                }
            }
        }
    }
    let mut map = vec![None; keep.len()];
    let mut next = 0u32;
    for v in 1..keep.len() {
        if keep[v] {
            next += 1;
            map[v] = Some(Var::new(next));
        }
    }
    let identity = next == f.n_declared() && (1..keep.len()).all(|v| map[v] == Some(Var::new(v as u32)));
    if identity {
        return None;
    }
    let m = |v: Var| map[v.index()].expect("kept variable");
    let universals: Vec<Var> = prefix.universals().iter().filter(|u| keep[u.index()]).map(|&u| m(u)).collect();
    let deps: Vec<(Var, Vec<Var>)> = prefix
        .existentials()
        .filter(|y| keep[y.index()])
        .map(|y| (m(y), prefix.deps(y).iter().map(|&u| m(u)).collect()))
        .collect();
    let prefix = Prefix::new(universals, deps).expect("renumbering keeps the prefix valid");
    let matrix: Vec<Clause> = f
        .matrix()
        .iter()
        .map(|c| c.map_lits(|l| Lit::new(m(l.var()), l.is_positive())))
        .collect();
    Some(f.with_parts(prefix, matrix, next))
}

fn renumber_pass(t: &Tester, f: &DqbfFormula, history: &mut Vec<DqbfFormula>) -> Result<(DqbfFormula, PassStats), DdminError> {
    let mut stats = PassStats {
        name: "renumber",
        attempts: 0,
        accepted: 0,
    };
    if let Some(cand) = renumber_dense(f) {
        if !t.out_of_budget() {
            stats.attempts += 1;
            if t.test(&cand)? {
                history.push(cand.clone());
                stats.accepted += 1;
                return Ok((cand, stats));
            }
        }
    }
    Ok((f.clone(), stats))
}

fn merge(into: &mut Vec<PassStats>, s: PassStats) {
    match into.iter_mut().find(|p| p.name == s.name) {
        Some(p) => {
            p.attempts += s.attempts;
            p.accepted += s.accepted;
        }
        None => into.push(s),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Clauses,
    Structure,
    Pipeline,
}

fn run(f: &DqbfFormula, pred: &dyn Interestingness, opts: &ShrinkOptions, mode: Mode) -> Result<ShrinkResult, DdminError> {
    if !pred.is_interesting(f)? {
        return Err(DdminError::NotInterestingInitially);
    }
    let t = Tester::new(pred, opts.budget);
    let mut start = f.clone();
    start.comments.clear();
    let mut history = vec![start.clone()];
    let mut passes = Vec::new();
    let mut cur = start;
    loop {
        let before = cur.clone();
        if mode != Mode::Structure {
            let (next, s) = ddmin_pass(&t, &cur, opts.exec, &mut history)?;
            cur = next;
            merge(&mut passes, s);
        }
        if mode != Mode::Clauses {
            for pass in [literal_pass, dependency_pass, renumber_pass] {
                let (next, s) = pass(&t, &cur, &mut history)?;
                cur = next;
                merge(&mut passes, s);
            }
        }
        if mode == Mode::Clauses || cur == before || t.out_of_budget() {
            break;
        }
    }
    let budget_hit = t.budget_hit.load(Ordering::Relaxed);
    // Final act: re-run the predicate without the cache, walking back
    // through accepted candidates if a flaky target disagrees.
    for cand in history.iter().rev() {
        if pred.is_interesting(cand)? {
            return Ok(ShrinkResult {
                reduced: cand.clone(),
                still_interesting: true,
                passes,
                budget_hit,
                tests_run: t.tests.load(Ordering::Relaxed),
                cache_hits: t.hits.load(Ordering::Relaxed),
            });
        }
        log::warn!("candidate no longer interesting on re-verification; backing off");
    }
    Err(DdminError::NotInterestingFinally)
}

/// Shrinks the clause set to a 1-minimal interesting subset.
pub fn ddmin_clauses(f: &DqbfFormula, pred: &dyn Interestingness, opts: &ShrinkOptions) -> Result<ShrinkResult, DdminError> {
    run(f, pred, opts, Mode::Clauses)
}

/// Literal, dependency and renumbering passes to a fixpoint.
pub fn shrink_structure(f: &DqbfFormula, pred: &dyn Interestingness, opts: &ShrinkOptions) -> Result<ShrinkResult, DdminError> {
    run(f, pred, opts, Mode::Structure)
}

/// Clause ddmin and structural passes alternated to a joint fixpoint.
pub fn ddmin_pipeline(f: &DqbfFormula, pred: &dyn Interestingness, opts: &ShrinkOptions) -> Result<ShrinkResult, DdminError> {
    run(f, pred, opts, Mode::Pipeline)
}
