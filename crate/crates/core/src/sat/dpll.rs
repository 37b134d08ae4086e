//! DPLL with two watched literals, chronological backtracking and
//! conflict-bumped variable activities. No clause learning.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CnfInstance, SatLimits, SatResult, SatStatus};

// Literal codes: 2 * var + negated, var in 1..=n.
fn code(lit: i32) -> usize {
    (lit.unsigned_abs() as usize) << 1 | usize::from(lit < 0)
}

fn var_of(code: usize) -> usize {
    code >> 1
}

const UNASSIGNED: i8 = 0;

struct Solver {
    clauses: Vec<Vec<usize>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<i8>,
    trail: Vec<usize>,
    trail_lim: Vec<usize>,
    // (decision literal, already flipped)
    decisions: Vec<(usize, bool)>,
    qhead: usize,
    activity: Vec<f64>,
    phase: Vec<bool>,
    bump: f64,
}

impl Solver {
    fn value(&self, c: usize) -> i8 {
        let a = self.assign[var_of(c)];
        if c & 1 == 1 {
            -a
        } else {
            a
        }
    }

    fn enqueue(&mut self, c: usize) {
        self.assign[var_of(c)] = if c & 1 == 1 { -1 } else { 1 };
        self.trail.push(c);
    }

    /// Returns the index of a conflicting clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = {
                    let a = self.assign[var_of(first)];
                    if first & 1 == 1 {
                        -a
                    } else {
                        a
                    }
                };
                if first_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let a = self.assign[var_of(l)];
                    let v = if l & 1 == 1 { -a } else { a };
                    if v != -1 {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[new_watch].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if first_val == -1 {
                    conflict = Some(ci);
                    break;
                }
                self.enqueue(first);
                i += 1;
            }
            // Re-install the remaining watchers (including those after a conflict).
            let rest = std::mem::take(&mut self.watches[false_lit]);
            ws.extend(rest);
            self.watches[false_lit] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn undo_to(&mut self, lim: usize) {
        for &c in &self.trail[lim..] {
            self.assign[var_of(c)] = UNASSIGNED;
        }
        self.trail.truncate(lim);
        self.qhead = lim;
    }

    fn bump_clause(&mut self, ci: usize) {
        for k in 0..self.clauses[ci].len() {
            let v = var_of(self.clauses[ci][k]);
            self.activity[v] += self.bump;
            if self.activity[v] > 1e100 {
                for a in &mut self.activity {
                    *a *= 1e-100;
                }
                self.bump *= 1e-100;
            }
        }
        self.bump /= 0.95;
    }

    fn pick_branch(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for v in 1..self.assign.len() {
            if self.assign[v] == UNASSIGNED
                && best.is_none_or(|b| self.activity[v] > self.activity[b])
            {
                best = Some(v);
            }
        }
        best.map(|v| v << 1 | usize::from(!self.phase[v]))
    }
}

/// Solves `inst` within `limits`. Complete: `Unknown` only on exhausted
/// limits. Every returned model is checked against all clauses.
pub fn sat_solve(inst: &CnfInstance, limits: &SatLimits) -> SatResult {
    let n = inst.n_vars as usize;
    let mut s = Solver {
        clauses: Vec::with_capacity(inst.clauses.len()),
        watches: vec![Vec::new(); 2 * n + 2],
        assign: vec![UNASSIGNED; n + 1],
        trail: Vec::with_capacity(n),
        trail_lim: Vec::new(),
        decisions: Vec::new(),
        qhead: 0,
        activity: vec![0.0; n + 1],
        phase: vec![true; n + 1],
        bump: 1.0,
    };
    if limits.seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
        for v in 1..=n {
            s.activity[v] = rng.random::<f64>() * 1e-3;
            s.phase[v] = rng.random();
        }
    }

    let mut units = Vec::new();
    for c in &inst.clauses {
        let mut lits: Vec<usize> = c.iter().map(|&l| code(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[1] == w[0] ^ 1) {
            continue;
        }
        match lits.len() {
            0 => return SatResult::unsat(),
            1 => units.push(lits[0]),
            _ => {
                let ci = s.clauses.len();
                s.watches[lits[0]].push(ci);
                s.watches[lits[1]].push(ci);
                s.clauses.push(lits);
            }
        }
    }
    for u in units {
        match s.value(u) {
            1 => {}
            -1 => return SatResult::unsat(),
            _ => s.enqueue(u),
        }
    }

    let start = Instant::now();
    let mut conflicts: u64 = 0;
    let mut steps: u64 = 0;
    loop {
        if let Some(ci) = s.propagate() {
            conflicts += 1;
            s.bump_clause(ci);
            loop {
                let Some((d, flipped)) = s.decisions.pop() else {
                    return SatResult::unsat();
                };
                let lim = s.trail_lim.pop().expect("one limit per decision");
                s.undo_to(lim);
                if !flipped {
                    s.trail_lim.push(s.trail.len());
                    s.decisions.push((d ^ 1, true));
                    s.enqueue(d ^ 1);
                    break;
                }
            }
            if limits.max_conflicts.is_some_and(|m| conflicts >= m) {
                return SatResult::unknown();
            }
            continue;
        }
        steps += 1;
        if steps.is_multiple_of(256) && limits.time_limit.is_some_and(|t| start.elapsed() >= t) {
            return SatResult::unknown();
        }
        match s.pick_branch() {
            None => break,
            Some(d) => {
                s.trail_lim.push(s.trail.len());
                s.decisions.push((d, false));
                s.enqueue(d);
            }
        }
    }

    let mut model = vec![false; n + 1];
    for v in 1..=n {
        model[v] = s.assign[v] == 1;
    }
    if let Err(i) = inst.check_model(&model) {
        panic!("internal SAT solver produced a model violating clause {i}");
    }
    SatResult {
        status: SatStatus::Sat,
        model: Some(model),
    }
}
