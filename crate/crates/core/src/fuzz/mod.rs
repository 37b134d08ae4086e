//! Seeded random DQBF instances.
//!
//! Universals are variables `1..=na`, existentials `na+1..=na+ne`. Each
//! universal enters each dependency set independently with probability `p`;
//! each clause picks `k` distinct variables uniformly with uniform
//! polarities. Duplicate clauses are redrawn up to 100 times. The random
//! stream is ChaCha8 seeded from the 64-bit seed, so output is
//! byte-identical for identical parameters within one build.

mod campaign;
mod sweep;

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Clause, DqbfFormula, Lit, Prefix, Var};

pub use campaign::{
    fuzz_campaign, target_verdict, CampaignConfig, CampaignReport, FailureKind, InstanceOutcome,
};
pub use sweep::{sweep_phase_transition, sweep_phase_transition_with, SweepRow, SweepTable};

/// Version of the generation procedure, recorded in the header.
pub const MODEL_VERSION: u32 = 1;

const MAX_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomModelParams {
    pub n_universal: u32,
    pub n_existential: u32,
    pub dep_prob: f64,
    pub n_clauses: usize,
    pub clause_width: usize,
    pub seed: u64,
    /// Every existential occurs in at least one clause.
    pub require_occurrence: bool,
}

impl Default for RandomModelParams {
    fn default() -> Self {
        RandomModelParams {
            n_universal: 3,
            n_existential: 2,
            dep_prob: 0.5,
            n_clauses: 8,
            clause_width: 2,
            seed: 0,
            require_occurrence: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("cannot produce {wanted} distinct clauses of width {width} (stuck at clause {at})")]
    UnsatisfiableConstraints { wanted: usize, width: usize, at: usize },
}

impl RandomModelParams {
    pub fn validate(&self) -> Result<(), FuzzError> {
        let n = (self.n_universal + self.n_existential) as usize;
        if !(0.0..=1.0).contains(&self.dep_prob) {
            return Err(FuzzError::InvalidParams("dep_prob must lie in [0, 1]".into()));
        }
        if self.clause_width == 0 || (self.n_clauses > 0 && self.clause_width > n) {
            return Err(FuzzError::InvalidParams(format!(
                "clause width {} must be between 1 and the variable count {n}",
                self.clause_width
            )));
        }
        Ok(())
    }

    pub fn header(&self) -> Vec<String> {
        vec![
            format!(
                "dqfuzz seed={} na={} ne={} p={} m={} k={}",
                self.seed,
                self.n_universal,
                self.n_existential,
                self.dep_prob,
                self.n_clauses,
                self.clause_width
            ),
            format!(
                "dqfuzz-model v{MODEL_VERSION} rng=chacha8 occ={}",
                u8::from(self.require_occurrence)
            ),
        ]
    }

    pub fn with_seed(&self, seed: u64) -> RandomModelParams {
        RandomModelParams {
            seed,
            ..self.clone()
        }
    }
}

pub fn generate(params: &RandomModelParams) -> Result<DqbfFormula, FuzzError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let na = params.n_universal;
    let ne = params.n_existential;
    let n = na + ne;
    let universals: Vec<Var> = (1..=na).map(Var::new).collect();

    let deps: Vec<(Var, Vec<Var>)> = (na + 1..=n)
        .map(|y| {
            let d = universals
                .iter()
                .copied()
                .filter(|_| rng.random_bool(params.dep_prob))
                .collect();
            (Var::new(y), d)
        })
        .collect();
    let prefix = Prefix::new(universals.iter().copied(), deps).expect("generated prefix is valid");

    // existentials that must appear, distributed round-robin over clauses
    let mut forced: Vec<Vec<Var>> = vec![Vec::new(); params.n_clauses];
    if params.require_occurrence && ne > 0 {
        if params.n_clauses * params.clause_width < ne as usize {
            return Err(FuzzError::UnsatisfiableConstraints {
                wanted: params.n_clauses,
                width: params.clause_width,
                at: 0,
            });
        }
        let mut ex: Vec<Var> = (na + 1..=n).map(Var::new).collect();
        ex.shuffle(&mut rng);
        for (i, y) in ex.into_iter().enumerate() {
            forced[i % params.n_clauses].push(y);
        }
    }

    let mut seen: HashSet<Clause> = HashSet::with_capacity(params.n_clauses);
    let mut matrix = Vec::with_capacity(params.n_clauses);
    for (at, must) in forced.iter().enumerate() {
        let mut placed = false;
        for _ in 0..MAX_RETRIES {
            let mut vars = must.clone();
            let rest = params.clause_width - vars.len();
            let pool: Vec<Var> = (1..=n).map(Var::new).filter(|v| !must.contains(v)).collect();
            vars.extend(index::sample(&mut rng, pool.len(), rest).into_iter().map(|i| pool[i]));
            let clause = Clause::new(vars.into_iter().map(|v| Lit::new(v, rng.random_bool(0.5))).collect());
            debug_assert!(!clause.is_tautological());
            if seen.insert(clause.clone()) {
                matrix.push(clause);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(FuzzError::UnsatisfiableConstraints {
                wanted: params.n_clauses,
                width: params.clause_width,
                at,
            });
        }
    }
    let mut f = DqbfFormula::new(prefix, matrix, n).expect("generated formula is valid");
    f.comments = params.header();
    Ok(f)
}
