use crate::model::{DqbfFormula, Var};
use crate::par::Exec;

use super::{is_autarky, Autarky, BoolFunc, OracleBudget, OracleError};

fn subsets(items: &[Var], max: usize) -> Vec<Vec<Var>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(items: &[Var], start: usize, max: usize, cur: &mut Vec<Var>, out: &mut Vec<Vec<Var>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, i + 1, max, cur, out);
            cur.pop();
        }
    }
    rec(items, 0, max, &mut current, &mut out);
    out
}

pub fn enumerate_autarkies(
    f: &DqbfFormula,
    max_vars: usize,
    budget: &OracleBudget,
) -> Result<Vec<Autarky>, OracleError> {
    enumerate_autarkies_with(f, max_vars, budget, Exec::default())
}

/// Every non-trivial autarky assigning at most `max_vars` existentials,
/// with functions ranging over all truth tables on the full dependency
/// sets. Only variables occurring in the matrix are assigned, so every
/// listed autarky touches at least one clause.
pub fn enumerate_autarkies_with(
    f: &DqbfFormula,
    max_vars: usize,
    budget: &OracleBudget,
    exec: Exec,
) -> Result<Vec<Autarky>, OracleError> {
    let prefix = f.prefix();
    let vars = f.occurring_existentials();
    let sets = subsets(&vars, max_vars);

    let log2_per_var = |y: Var| 2f64.powi(prefix.deps(y).len().min(1000) as i32);
    let total: f64 = sets
        .iter()
        .map(|s| 2f64.powf(s.iter().map(|&y| log2_per_var(y)).sum()))
        .sum();
    if total > budget.max_skolem_candidates as f64 {
        return Err(OracleError::BudgetExceeded {
            log2_cost: total.log2(),
        });
    }

    let per_set = exec.map(&sets, |set| {
        let widths: Vec<usize> = set.iter().map(|&y| 1usize << prefix.deps(y).len()).collect();
        let bits: usize = widths.iter().sum();
        let mut found = Vec::new();
        for cand in 0u64..1 << bits {
            let mut shift = 0;
            let a: Autarky = set
                .iter()
                .zip(&widths)
                .map(|(&y, &w)| {
                    let s = shift;
                    shift += w;
                    let func =
                        BoolFunc::from_rows(prefix.deps(y).to_vec(), |row| cand >> (s + row) & 1 == 1);
                    (y, func)
                })
                .collect();
            if is_autarky(f, &a) {
                found.push(a);
            }
        }
        found
    });
    Ok(per_set.into_iter().flatten().collect())
}
