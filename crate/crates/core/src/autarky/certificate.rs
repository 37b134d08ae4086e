//! Replayable reduction certificates.
//!
//! Text format, one item per line:
//!
//! ```text
//! dqprep-cert 1
//! orig <sha256 of the original formula>
//! kernel <sha256 of the kernel>
//! incomplete                       (present when some detector gave up)
//! c system e1                      (informational)
//! autarky
//! func <y> <domain vars> : <cube>|<cube>|...
//! removes <1-based clause indices> 0
//! check <sha256 of the step's autarky, func and removes lines>
//! ```
//!
//! An empty cover is constant 0 and `TRUE` is constant 1. Clause indices
//! refer to the formula as it stands before the step. Hashes are taken over
//! the comment-free DQDIMACS rendering.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{DqbfFormula, Lit, Var};
use crate::oracle::{apply_autarky, is_autarky_with, touched_clauses, Autarky, BoolFunc, TautologyMethod};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertStep {
    pub autarky: Autarky,
    /// 0-based indices into the formula before this step, ascending.
    pub removed: Vec<usize>,
    pub system: Option<String>,
    /// Digest stored in the file; `None` for steps built in memory.
    pub check: Option<String>,
}

impl CertStep {
    fn body(&self) -> String {
        let mut s = String::from("autarky\n");
        for (y, func) in self.autarky.iter() {
            let _ = write!(s, "func {}", y.id());
            for v in func.domain() {
                let _ = write!(s, " {}", v.id());
            }
            s.push_str(" :");
            if func.is_const_true() {
                s.push_str(" TRUE");
            } else if !func.cover().is_empty() {
                let cubes: Vec<String> = func
                    .cover()
                    .iter()
                    .map(|c| {
                        c.iter()
                            .map(|l| l.to_dimacs().to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                let _ = write!(s, " {}", cubes.join("|"));
            }
            s.push('\n');
        }
        s.push_str("removes");
        for i in &self.removed {
            let _ = write!(s, " {}", i + 1);
        }
        s.push_str(" 0\n");
        s
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.body().as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub original_hash: String,
    pub kernel_hash: String,
    pub steps: Vec<CertStep>,
    pub incomplete: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("missing `{0}` line")]
    Missing(&'static str),
}

impl ReductionCertificate {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "dqprep-cert 1\norig {}\nkernel {}\n",
            self.original_hash, self.kernel_hash
        );
        if self.incomplete {
            s.push_str("incomplete\n");
        }
        for step in &self.steps {
            if let Some(sys) = &step.system {
                let _ = writeln!(s, "c system {sys}");
            }
            s.push_str(&step.body());
            let _ = writeln!(s, "check {}", step.digest());
        }
        s
    }

    pub fn parse(text: &str) -> Result<ReductionCertificate, CertParseError> {
        let bad = |line: usize, msg: &str| CertParseError::Malformed {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "dqprep-cert 1")) => {}
            Some((n, _)) => return Err(bad(n, "expected `dqprep-cert 1`")),
            None => return Err(CertParseError::Missing("dqprep-cert")),
        }
        let mut original_hash = None;
        let mut kernel_hash = None;
        let mut incomplete = false;
        let mut steps: Vec<CertStep> = Vec::new();
        let mut pending_system = None;
        // step under construction: its funcs, then removes, then check
        let mut open: Option<CertStep> = None;
        let mut expecting_check = false;

        for (n, line) in lines {
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            if head == "c" {
                if let Some(sys) = rest.strip_prefix("system ") {
                    pending_system = Some(sys.trim().to_string());
                }
                continue;
            }
            if expecting_check && head != "check" {
                // legacy certificates without check lines
                steps.push(open.take().expect("open step"));
                expecting_check = false;
            }
            match head {
                "orig" => original_hash = Some(rest.to_string()),
                "kernel" => kernel_hash = Some(rest.to_string()),
                "incomplete" => incomplete = true,
                "autarky" => {
                    if open.is_some() {
                        return Err(bad(n, "previous step has no `removes` line"));
                    }
                    open = Some(CertStep {
                        autarky: Autarky::new(),
                        removed: Vec::new(),
                        system: pending_system.take(),
                        check: None,
                    });
                }
                "func" => {
                    let step = open.as_mut().ok_or_else(|| bad(n, "`func` outside a step"))?;
                    let (y, func) = parse_func(rest).map_err(|m| bad(n, &m))?;
                    if step.autarky.insert(y, func).is_some() {
                        return Err(bad(n, "variable assigned twice in one step"));
                    }
                }
                "removes" => {
                    let step = open.as_mut().ok_or_else(|| bad(n, "`removes` outside a step"))?;
                    let nums: Vec<usize> = rest
                        .split_whitespace()
                        .map(|t| t.parse::<usize>().map_err(|_| bad(n, "bad clause index")))
                        .collect::<Result<_, _>>()?;
                    match nums.split_last() {
                        Some((0, idx)) if idx.iter().all(|&i| i > 0) => {
                            step.removed = idx.iter().map(|i| i - 1).collect();
                        }
                        _ => return Err(bad(n, "`removes` must list 1-based indices ending in 0")),
                    }
                    expecting_check = true;
                }
                "check" => {
                    if !expecting_check {
                        return Err(bad(n, "`check` without a preceding `removes`"));
                    }
                    let mut step = open.take().expect("open step");
                    step.check = Some(rest.to_string());
                    steps.push(step);
                    expecting_check = false;
                }
                _ => return Err(bad(n, &format!("unknown keyword `{head}`"))),
            }
        }
        if expecting_check {
            steps.push(open.take().expect("open step"));
        }
        if open.is_some() {
            return Err(CertParseError::Missing("removes"));
        }
        Ok(ReductionCertificate {
            original_hash: original_hash.ok_or(CertParseError::Missing("orig"))?,
            kernel_hash: kernel_hash.ok_or(CertParseError::Missing("kernel"))?,
            steps,
            incomplete,
        })
    }
}

fn parse_lit(t: &str) -> Result<Lit, String> {
    match t.parse::<i64>() {
        Ok(v) if v != 0 && v.unsigned_abs() <= u32::MAX as u64 => Ok(Lit::from_dimacs(v)),
        _ => Err(format!("bad literal `{t}`")),
    }
}

fn parse_var(t: &str) -> Result<Var, String> {
    match t.parse::<u32>() {
        Ok(v) if v > 0 => Ok(Var::new(v)),
        _ => Err(format!("bad variable `{t}`")),
    }
}

fn parse_func(rest: &str) -> Result<(Var, BoolFunc), String> {
    let (head, cover) = rest.split_once(':').ok_or("missing `:`")?;
    let mut head = head.split_whitespace();
    let y = parse_var(head.next().ok_or("missing variable")?)?;
    let domain: Vec<Var> = head.map(parse_var).collect::<Result<_, _>>()?;
    let cover = cover.trim();
    let cubes: Vec<Vec<Lit>> = if cover.is_empty() {
        Vec::new()
    } else if cover == "TRUE" {
        vec![Vec::new()]
    } else {
        cover
            .split('|')
            .map(|c| {
                let cube: Vec<Lit> = c.split_whitespace().map(parse_lit).collect::<Result<_, _>>()?;
                if cube.is_empty() {
                    Err("empty cube".to_string())
                } else {
                    Ok(cube)
                }
            })
            .collect::<Result<_, _>>()?
    };
    let func = BoolFunc::new(domain, cubes).map_err(|e| e.to_string())?;
    Ok((y, func))
}

/// Outcome of replaying a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertCheck {
    pub valid: bool,
    /// 0-based step at which replay failed.
    pub failed_step: Option<usize>,
    pub reason: String,
}

impl CertCheck {
    fn ok() -> CertCheck {
        CertCheck {
            valid: true,
            failed_step: None,
            reason: "ok".into(),
        }
    }

    fn fail(step: Option<usize>, reason: impl Into<String>) -> CertCheck {
        CertCheck {
            valid: false,
            failed_step: step,
            reason: reason.into(),
        }
    }
}

/// Replays `cert` from `original` using only the reference semantics:
/// every step must be a valid, non-trivial autarky of the current formula
/// whose touched clauses are exactly the listed ones, and the result must
/// be `kernel`.
pub fn check_certificate(
    original: &DqbfFormula,
    kernel: &DqbfFormula,
    cert: &ReductionCertificate,
) -> CertCheck {
    if original.digest() != cert.original_hash {
        return CertCheck::fail(None, "original formula hash mismatch");
    }
    let mut current = original.clone();
    for (i, step) in cert.steps.iter().enumerate() {
        if let Err(e) = is_autarky_with(&current, &step.autarky, TautologyMethod::Auto) {
            return CertCheck::fail(Some(i), format!("not an autarky: {e}"));
        }
        let touched = touched_clauses(&current, &step.autarky);
        if touched.is_empty() {
            return CertCheck::fail(Some(i), "step touches no clause");
        }
        if touched != step.removed {
            return CertCheck::fail(Some(i), "removed clauses differ from the touched clauses");
        }
        if let Some(check) = &step.check {
            if *check != step.digest() {
                return CertCheck::fail(Some(i), "step digest mismatch");
            }
        }
        current = match apply_autarky(&current, &step.autarky) {
            Ok(next) => next,
            Err(e) => return CertCheck::fail(Some(i), e.to_string()),
        };
    }
    if current.digest() != cert.kernel_hash {
        return CertCheck::fail(None, "replayed kernel hash mismatch");
    }
    if kernel.digest() != cert.kernel_hash
        || kernel.prefix() != current.prefix()
        || kernel.matrix() != current.matrix()
    {
        return CertCheck::fail(None, "supplied kernel differs from the replayed kernel");
    }
    CertCheck::ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Var {
        Var::new(i)
    }

    fn sample() -> ReductionCertificate {
        let mut a = Autarky::new();
        a.insert(v(5), BoolFunc::constant_over(vec![v(2), v(3)], false));
        a.insert(
            v(6),
            BoolFunc::new(vec![v(1)], vec![vec![v(1).pos()]]).unwrap(),
        );
        let mut b = Autarky::new();
        b.insert(v(4), BoolFunc::constant_over(vec![v(1), v(2)], true));
        b.insert(
            v(7),
            BoolFunc::new(vec![v(1), v(2)], vec![vec![v(1).neg(), v(2).pos()], vec![v(1).pos()]]).unwrap(),
        );
        ReductionCertificate {
            original_hash: "ab".repeat(32),
            kernel_hash: "cd".repeat(32),
            steps: vec![
                CertStep {
                    autarky: a,
                    removed: vec![2, 4],
                    system: Some("e1".into()),
                    check: None,
                },
                CertStep {
                    autarky: b,
                    removed: vec![0],
                    system: None,
                    check: None,
                },
            ],
            incomplete: true,
        }
    }

    #[test]
    fn text_round_trip() {
        let cert = sample();
        let text = cert.to_text();
        assert!(text.contains("func 5 2 3 :\n"));
        assert!(text.contains("func 4 1 2 : TRUE\n"));
        assert!(text.contains("func 7 1 2 : 1|-1 2\n"));
        assert!(text.contains("removes 3 5 0\n"));
        let back = ReductionCertificate::parse(&text).unwrap();
        assert_eq!(back.original_hash, cert.original_hash);
        assert!(back.incomplete);
        assert_eq!(back.steps.len(), 2);
        for (x, y) in back.steps.iter().zip(&cert.steps) {
            assert_eq!(x.autarky, y.autarky);
            assert_eq!(x.removed, y.removed);
            assert_eq!(x.check.as_deref(), Some(y.digest().as_str()));
        }
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn malformed_inputs() {
        assert!(ReductionCertificate::parse("").is_err());
        assert!(ReductionCertificate::parse("dqprep-cert 2\n").is_err());
        assert_eq!(
            ReductionCertificate::parse("dqprep-cert 1\norig a\n"),
            Err(CertParseError::Missing("kernel"))
        );
        let bad_removes = "dqprep-cert 1\norig a\nkernel b\nautarky\nfunc 2 1 : 1\nremoves 1\n";
        assert!(ReductionCertificate::parse(bad_removes).is_err());
        let outside = "dqprep-cert 1\norig a\nkernel b\nfunc 2 1 : 3\n";
        assert!(ReductionCertificate::parse(outside).is_err());
        let bad_cube = "dqprep-cert 1\norig a\nkernel b\nautarky\nfunc 2 1 : 3\nremoves 1 0\n";
        assert!(ReductionCertificate::parse(bad_cube).is_err());
    }
}
