use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use crate::model::print_dqdimacs;
use crate::oracle::{solve_bruteforce, OracleBudget};
use crate::par::Exec;
use crate::process::{run_template, RunOutcome, Termination};

use super::{generate, RandomModelParams};

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub params: RandomModelParams,
    pub count: usize,
    /// Command template with a `{file}` placeholder.
    pub target_cmd: String,
    pub oracle_check: bool,
    /// Where failing instances are saved; nothing is saved when `None`.
    pub out_dir: Option<PathBuf>,
    pub run_timeout: Option<Duration>,
    pub oracle_budget: OracleBudget,
    /// Exit codes that count as normal termination.
    pub expected_exits: Vec<i32>,
    pub exec: Exec,
}

impl CampaignConfig {
    pub fn new(params: RandomModelParams, count: usize, target_cmd: impl Into<String>) -> Self {
        CampaignConfig {
            params,
            count,
            target_cmd: target_cmd.into(),
            oracle_check: true,
            out_dir: None,
            run_timeout: Some(Duration::from_secs(10)),
            oracle_budget: OracleBudget::default(),
            expected_exits: vec![0, 10, 20, 30],
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Crash,
    Timeout,
    Disagreement,
    GenerationFailed,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::Crash => "crash",
            FailureKind::Timeout => "timeout",
            FailureKind::Disagreement => "disagreement",
            FailureKind::GenerationFailed => "generation-failed",
        })
    }
}

#[derive(Debug, Clone)]
pub struct InstanceOutcome {
    pub index: usize,
    pub seed: u64,
    /// Digest of the generated instance.
    pub digest: Option<String>,
    pub termination: Option<Termination>,
    pub target: Option<bool>,
    pub oracle: Option<bool>,
    pub failure: Option<FailureKind>,
    pub elapsed: Duration,
    pub saved: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub instances: Vec<InstanceOutcome>,
}

impl CampaignReport {
    pub fn count(&self, kind: FailureKind) -> usize {
        self.instances
            .iter()
            .filter(|i| i.failure == Some(kind))
            .count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &InstanceOutcome> {
        self.instances.iter().filter(|i| i.failure.is_some())
    }
}

impl fmt::Display for CampaignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances: {}", self.instances.len())?;
        for kind in [
            FailureKind::Crash,
            FailureKind::Timeout,
            FailureKind::Disagreement,
            FailureKind::GenerationFailed,
        ] {
            writeln!(f, "{kind}: {}", self.count(kind))?;
        }
        for i in self.failures() {
            write!(f, "fail index={} seed={} kind={}", i.index, i.seed, i.failure.unwrap())?;
            if let Some(p) = &i.saved {
                write!(f, " saved={}", p.display())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// SAT/UNSAT answer of a solver run: exit code 10/20, or an
/// `s SATISFIABLE` / `s UNSATISFIABLE` line.
pub fn target_verdict(out: &RunOutcome) -> Option<bool> {
    match out.termination {
        Termination::Exited(10) => return Some(true),
        Termination::Exited(20) => return Some(false),
        _ => {}
    }
    out.stdout.lines().find_map(|l| match l.trim() {
        "s SATISFIABLE" => Some(true),
        "s UNSATISFIABLE" => Some(false),
        _ => None,
    })
}

/// Runs the target on `count` generated instances (instance `i` uses seed
/// `params.seed + i`) and records crashes, timeouts and disagreements with
/// the brute-force oracle.
pub fn fuzz_campaign(cfg: &CampaignConfig) -> std::io::Result<CampaignReport> {
    let work = tempfile::tempdir()?;
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir)?;
    }
    let instances = cfg.exec.map_range(0..cfg.count, |index| {
        let seed = cfg.params.seed.wrapping_add(index as u64);
        let mut outcome = InstanceOutcome {
            index,
            seed,
            digest: None,
            termination: None,
            target: None,
            oracle: None,
            failure: None,
            elapsed: Duration::ZERO,
            saved: None,
        };
        let f = match generate(&cfg.params.with_seed(seed)) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("instance {index}: {e}");
                outcome.failure = Some(FailureKind::GenerationFailed);
                return Ok(outcome);
            }
        };
        outcome.digest = Some(f.digest());
        let text = print_dqdimacs(&f);
        let path = work.path().join(format!("fuzz-{seed}.dqdimacs"));
        fs::write(&path, &text)?;
        let run = run_template(&cfg.target_cmd, &path, cfg.run_timeout)?;
        outcome.elapsed = run.elapsed;
        outcome.termination = Some(run.termination);
        outcome.target = target_verdict(&run);
        outcome.failure = match run.termination {
            Termination::TimedOut => Some(FailureKind::Timeout),
            Termination::Signaled(_) => Some(FailureKind::Crash),
            Termination::Exited(c) if !cfg.expected_exits.contains(&c) => Some(FailureKind::Crash),
            Termination::Exited(_) => None,
        };
        if outcome.failure.is_none() && cfg.oracle_check {
            outcome.oracle = solve_bruteforce(&f, &cfg.oracle_budget).decided();
            if let (Some(t), Some(o)) = (outcome.target, outcome.oracle) {
                if t != o {
                    outcome.failure = Some(FailureKind::Disagreement);
                }
            }
        }
        if let (Some(kind), Some(dir)) = (outcome.failure, &cfg.out_dir) {
            let saved = dir.join(format!("{kind}-seed{seed}.dqdimacs"));
            fs::write(&saved, &text)?;
            outcome.saved = Some(saved);
        }
        Ok(outcome)
    });
    Ok(CampaignReport {
        instances: instances.into_iter().collect::<std::io::Result<_>>()?,
    })
}
