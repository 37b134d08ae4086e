use std::io::Write as _;
use std::time::Duration;

use super::{CnfInstance, SatError, SatResult, SatStatus};
use crate::process::{run_template, Termination};

/// Interprets competition-style solver output (`s` and `v` lines) together
/// with the 10/20 exit-code convention.
pub fn parse_solver_output(
    inst: &CnfInstance,
    termination: Termination,
    stdout: &str,
) -> Result<SatResult, SatError> {
    let code = match termination {
        Termination::TimedOut => return Ok(SatResult::unknown()),
        Termination::Signaled(sig) => {
            return Err(SatError::SolverCrashed(format!("killed by signal {sig}")))
        }
        Termination::Exited(c) => c,
    };
    let mut status = None;
    let mut values: Vec<i64> = Vec::new();
    for line in stdout.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => SatStatus::Sat,
                "UNSATISFIABLE" => SatStatus::Unsat,
                _ => SatStatus::Unknown,
            });
        } else if let Some(rest) = line.strip_prefix("v ") {
            values.extend(rest.split_whitespace().filter_map(|t| t.parse::<i64>().ok()));
        }
    }
    let status = match (status, code) {
        (Some(s), _) => s,
        (None, 10) => SatStatus::Sat,
        (None, 20) => SatStatus::Unsat,
        (None, 0) => SatStatus::Unknown,
        (None, c) => return Err(SatError::SolverCrashed(format!("unexpected exit code {c}"))),
    };
    match (status, code) {
        (SatStatus::Sat, 20) | (SatStatus::Unsat, 10) => {
            return Err(SatError::SolverCrashed(format!(
                "status line contradicts exit code {code}"
            )))
        }
        (_, 0 | 10 | 20) => {}
        (_, c) => return Err(SatError::SolverCrashed(format!("unexpected exit code {c}"))),
    }
    match status {
        SatStatus::Sat => {
            if values.is_empty() && inst.n_vars > 0 {
                return Err(SatError::ModelInvalid("no `v` lines".into()));
            }
            let mut model = vec![false; inst.n_vars as usize + 1];
            for v in values {
                let idx = v.unsigned_abs() as usize;
                if v != 0 && idx < model.len() {
                    model[idx] = v > 0;
                }
            }
            if let Err(i) = inst.check_model(&model) {
                return Err(SatError::ModelInvalid(format!("clause {} is falsified", i + 1)));
            }
            Ok(SatResult {
                status,
                model: Some(model),
            })
        }
        SatStatus::Unsat => Ok(SatResult::unsat()),
        SatStatus::Unknown => Ok(SatResult::unknown()),
    }
}

/// Runs an external solver on `inst` written to a temporary DIMACS file.
pub fn sat_solve_external(
    inst: &CnfInstance,
    cmd: &str,
    timeout: Option<Duration>,
) -> Result<SatResult, SatError> {
    let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
    file.write_all(inst.to_dimacs().as_bytes())?;
    file.flush()?;
    let out = run_template(cmd, file.path(), timeout)?;
    parse_solver_output(inst, out.termination, &out.stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> CnfInstance {
        CnfInstance {
            n_vars: 2,
            clauses: vec![vec![1, 2], vec![-1]],
        }
    }

    #[test]
    fn parses_sat_output() {
        let r = parse_solver_output(&xy(), Termination::Exited(10), "c hi\ns SATISFIABLE\nv -1 2 0\n")
            .unwrap();
        assert_eq!(r.status, SatStatus::Sat);
        assert!(r.value(2));
    }

    #[test]
    fn exit_code_only() {
        let r = parse_solver_output(&xy(), Termination::Exited(20), "").unwrap();
        assert_eq!(r.status, SatStatus::Unsat);
    }

    #[test]
    fn bad_model_surfaced() {
        let err =
            parse_solver_output(&xy(), Termination::Exited(10), "s SATISFIABLE\nv 1 2 0\n").unwrap_err();
        assert!(matches!(err, SatError::ModelInvalid(_)));
    }

    #[test]
    fn crashes() {
        assert!(matches!(
            parse_solver_output(&xy(), Termination::Signaled(11), ""),
            Err(SatError::SolverCrashed(_))
        ));
        assert!(matches!(
            parse_solver_output(&xy(), Termination::Exited(3), ""),
            Err(SatError::SolverCrashed(_))
        ));
    }

    #[test]
    fn shell_solver_round_trip() {
        let contradiction = CnfInstance {
            n_vars: 1,
            clauses: vec![vec![1], vec![-1]],
        };
        let r = sat_solve_external(&contradiction, "echo 's UNSATISFIABLE'; exit 20", None).unwrap();
        assert_eq!(r.status, SatStatus::Unsat);
        let err = sat_solve_external(&xy(), "echo 's SATISFIABLE'; echo 'v 1 -2 0'; exit 10", None)
            .unwrap_err();
        assert!(matches!(err, SatError::ModelInvalid(_)));
    }
}
