use std::io::Write as _;
use std::time::Duration;

use crate::fuzz::target_verdict;
use crate::model::{print_dqdimacs, DqbfFormula};
use crate::oracle::{solve_bruteforce, OracleBudget};
use crate::process::{run_template, Termination};

use super::DdminError;

/// Decides whether a candidate still shows the behavior being chased.
pub trait Interestingness: Sync {
    fn is_interesting(&self, f: &DqbfFormula) -> Result<bool, DdminError>;
}

impl<F> Interestingness for F
where
    F: Fn(&DqbfFormula) -> bool + Sync,
{
    fn is_interesting(&self, f: &DqbfFormula) -> Result<bool, DdminError> {
        Ok(self(f))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalMatch {
    Any,
    Exact(i32),
}

/// Predicate over one run of an external command on the candidate file. All
/// configured components must hold. A timed-out run is uninteresting unless
/// `timeout_interesting` is set.
#[derive(Debug, Clone)]
pub struct InterestingnessSpec {
    /// Command template with a `{file}` placeholder.
    pub cmd: String,
    pub exit_codes: Vec<i32>,
    pub signal: Option<SignalMatch>,
    pub grep: Option<String>,
    /// The command's SAT/UNSAT answer contradicts the brute-force oracle.
    pub oracle_mismatch: bool,
    pub timeout_interesting: bool,
    pub per_run_timeout: Duration,
    /// Wall-clock budget for the whole reduction, counted after the
    /// initial check.
    pub total_budget: Option<Duration>,
    pub oracle_budget: OracleBudget,
}

impl InterestingnessSpec {
    pub fn new(cmd: impl Into<String>) -> Self {
        InterestingnessSpec {
            cmd: cmd.into(),
            exit_codes: Vec::new(),
            signal: None,
            grep: None,
            oracle_mismatch: false,
            timeout_interesting: false,
            per_run_timeout: Duration::from_secs(10),
            total_budget: None,
            oracle_budget: OracleBudget::default(),
        }
    }

    pub fn validate(&self) -> Result<(), DdminError> {
        if self.exit_codes.is_empty()
            && self.signal.is_none()
            && self.grep.is_none()
            && !self.oracle_mismatch
            && !self.timeout_interesting
        {
            return Err(DdminError::InvalidPredicate("no predicate component set".into()));
        }
        if self.per_run_timeout.is_zero() {
            return Err(DdminError::InvalidPredicate("per-run timeout must be positive".into()));
        }
        Ok(())
    }
}

impl Interestingness for InterestingnessSpec {
    fn is_interesting(&self, f: &DqbfFormula) -> Result<bool, DdminError> {
        let mut file = tempfile::Builder::new()
            .prefix("ddmin-")
            .suffix(".dqdimacs")
            .tempfile()
            .map_err(|e| DdminError::ToolFailure(e.to_string()))?;
        file.write_all(print_dqdimacs(f).as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| DdminError::ToolFailure(e.to_string()))?;
        let run = run_template(&self.cmd, file.path(), Some(self.per_run_timeout))
            .map_err(|e| DdminError::ToolFailure(e.to_string()))?;
        match run.termination {
            Termination::TimedOut => return Ok(self.timeout_interesting),
            Termination::Exited(c @ (126 | 127)) if !self.exit_codes.contains(&c) => {
                return Err(DdminError::ToolFailure(format!(
                    "`{}` could not be run (exit {c}): {}",
                    self.cmd,
                    run.stderr.trim()
                )));
            }
            _ => {}
        }
        if self.timeout_interesting
            && self.exit_codes.is_empty()
            && self.signal.is_none()
            && self.grep.is_none()
            && !self.oracle_mismatch
        {
            return Ok(false);
        }
        if !self.exit_codes.is_empty()
            && !matches!(run.termination, Termination::Exited(c) if self.exit_codes.contains(&c))
        {
            return Ok(false);
        }
        match (self.signal, run.termination) {
            (None, _) => {}
            (Some(SignalMatch::Any), Termination::Signaled(_)) => {}
            (Some(SignalMatch::Exact(s)), Termination::Signaled(t)) if s == t => {}
            _ => return Ok(false),
        }
        if let Some(g) = &self.grep {
            if !run.stdout.contains(g.as_str()) {
                return Ok(false);
            }
        }
        if self.oracle_mismatch {
            let Some(answer) = target_verdict(&run) else {
                return Ok(false);
            };
            match solve_bruteforce(f, &self.oracle_budget).decided() {
                Some(truth) if truth != answer => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DqbfFormula;

    fn f() -> DqbfFormula {
        DqbfFormula::from_dimacs(&[1], &[(2, &[1])], &[&[2, 1]]).unwrap()
    }

    #[test]
    fn components() {
        let mut s = InterestingnessSpec::new("grep -q '2 1 0' {file} && exit 3; exit 0");
        assert!(s.validate().is_err());
        s.exit_codes = vec![3];
        assert!(s.is_interesting(&f()).unwrap());
        s.grep = Some("nothing".into());
        assert!(!s.is_interesting(&f()).unwrap());

        let mut sig = InterestingnessSpec::new("kill -ABRT $$; : {file}");
        sig.signal = Some(SignalMatch::Exact(6));
        assert!(sig.is_interesting(&f()).unwrap());
        sig.signal = Some(SignalMatch::Exact(11));
        assert!(!sig.is_interesting(&f()).unwrap());
    }

    #[test]
    fn timeouts_and_missing_tools() {
        let mut s = InterestingnessSpec::new("sleep 5; : {file}");
        s.exit_codes = vec![0];
        s.per_run_timeout = Duration::from_millis(50);
        assert!(!s.is_interesting(&f()).unwrap());
        let mut missing = InterestingnessSpec::new("/nonexistent/solver {file}");
        missing.exit_codes = vec![1];
        assert!(matches!(
            missing.is_interesting(&f()),
            Err(DdminError::ToolFailure(_))
        ));
    }

    #[test]
    fn oracle_mismatch() {
        // the formula is SAT; a target answering UNSAT is wrong
        let mut s = InterestingnessSpec::new("exit 20; : {file}");
        s.oracle_mismatch = true;
        assert!(s.is_interesting(&f()).unwrap());
        s.cmd = "exit 10; : {file}".into();
        assert!(!s.is_interesting(&f()).unwrap());
    }
}
