use std::fmt;

use crate::oracle::{solve_bruteforce, OracleBudget, SolveOutcome};
use crate::par::Exec;

use super::{generate, RandomModelParams};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub ratio: f64,
    pub n_clauses: usize,
    pub samples: usize,
    pub sat: usize,
    pub unsat: usize,
    pub budget_exceeded: usize,
    /// Instances the generator could not produce.
    pub failed: usize,
}

impl SweepRow {
    /// SAT fraction among decided instances.
    pub fn frac_sat(&self) -> f64 {
        let decided = self.sat + self.unsat;
        if decided == 0 {
            return f64::NAN;
        }
        self.sat as f64 / decided as f64
    }

    pub fn frac_budget(&self) -> f64 {
        self.budget_exceeded as f64 / self.samples.max(1) as f64
    }

    /// Binomial standard error of [`SweepRow::frac_sat`].
    pub fn std_error(&self) -> f64 {
        let n = (self.sat + self.unsat) as f64;
        let p = self.frac_sat();
        (p * (1.0 - p) / n).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Whether the SAT fraction never rises by more than `z` combined
    /// standard errors between any two ratios.
    pub fn non_increasing_within(&self, z: f64) -> bool {
        let rows: Vec<&SweepRow> = self.rows.iter().filter(|r| !r.frac_sat().is_nan()).collect();
        rows.iter().enumerate().all(|(i, a)| {
            rows[i + 1..].iter().all(|b| {
                let band = z * (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
                b.frac_sat() <= a.frac_sat() + band
            })
        })
    }

    /// First ratio whose SAT fraction drops to 0.5 or below.
    pub fn crossing(&self) -> Option<f64> {
        self.rows.iter().find(|r| r.frac_sat() <= 0.5).map(|r| r.ratio)
    }
}

impl fmt::Display for SweepTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ratio\tclauses\tsamples\tsat\tunsat\tbudget\tfrac_sat\tfrac_budget")?;
        for r in &self.rows {
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}",
                r.ratio,
                r.n_clauses,
                r.samples,
                r.sat,
                r.unsat,
                r.budget_exceeded,
                r.frac_sat(),
                r.frac_budget()
            )?;
        }
        Ok(())
    }
}

pub fn sweep_phase_transition(
    base: &RandomModelParams,
    ratios: &[f64],
    samples: usize,
    budget: &OracleBudget,
) -> SweepTable {
    sweep_phase_transition_with(base, ratios, samples, budget, Exec::default())
}

/// For each ratio, solves `samples` instances with
/// `round(ratio * (na + ne))` clauses; sample `s` uses seed `base.seed + s`.
pub fn sweep_phase_transition_with(
    base: &RandomModelParams,
    ratios: &[f64],
    samples: usize,
    budget: &OracleBudget,
    exec: Exec,
) -> SweepTable {
    let n_vars = (base.n_universal + base.n_existential) as f64;
    let jobs: Vec<(usize, u64)> = (0..ratios.len())
        .flat_map(|r| (0..samples as u64).map(move |s| (r, s)))
        .collect();
    let outcomes = exec.map(&jobs, |&(r, s)| {
        let params = RandomModelParams {
            n_clauses: (ratios[r] * n_vars).round() as usize,
            seed: base.seed.wrapping_add(s),
            ..base.clone()
        };
        generate(&params).ok().map(|f| solve_bruteforce(&f, budget))
    });
    let rows = ratios
        .iter()
        .enumerate()
        .map(|(r, &ratio)| {
            let mut row = SweepRow {
                ratio,
                n_clauses: (ratio * n_vars).round() as usize,
                samples,
                sat: 0,
                unsat: 0,
                budget_exceeded: 0,
                failed: 0,
            };
            for (job, out) in jobs.iter().zip(&outcomes) {
                if job.0 != r {
                    continue;
                }
                match out {
                    Some(SolveOutcome::Sat(_)) => row.sat += 1,
                    Some(SolveOutcome::Unsat) => row.unsat += 1,
                    Some(SolveOutcome::BudgetExceeded { .. }) => row.budget_exceeded += 1,
                    None => row.failed += 1,
                }
            }
            row
        })
        .collect();
    SweepTable { rows }
}
