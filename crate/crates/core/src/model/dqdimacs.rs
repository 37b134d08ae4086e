//! DQDIMACS reader and writer.
//!
//! QDIMACS `a`/`e` blocks define quantification. A `d <evar> <uvar>... 0`
//! line gives an existential an explicit dependency set; it either declares
//! a new existential or replaces the linear-prefix dependencies of one bound
//! by an `e` line. Existentials without a `d` line depend on all universals
//! declared before them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Clause, DqbfFormula, Lit, Prefix, Quant, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {msg}")]
    MalformedHeader { line: usize, msg: String },
    #[error("line {line}: malformed line: {msg}")]
    MalformedLine { line: usize, msg: String },
    #[error("line {line}: unknown variable {var}")]
    UnknownVariable { line: usize, var: u64 },
    #[error("line {line}: dependency of {evar} on non-universal variable {dep}")]
    DependencyOnNonUniversal { line: usize, evar: u32, dep: u32 },
    #[error("line {line}: variable {var} quantified more than once")]
    DuplicateQuantification { line: usize, var: u32 },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::MalformedHeader { line, .. }
            | ParseError::MalformedLine { line, .. }
            | ParseError::UnknownVariable { line, .. }
            | ParseError::DependencyOnNonUniversal { line, .. }
            | ParseError::DuplicateQuantification { line, .. } => Some(*line),
            ParseError::ClauseCountMismatch { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Treat variables missing from every quantifier line as outermost
    /// universals instead of rejecting them.
    pub lenient: bool,
}

pub fn parse_dqdimacs(text: &str) -> Result<DqbfFormula, ParseError> {
    parse_dqdimacs_with(text, ParseOptions::default())
}

struct Binding {
    kind: Quant,
    /// Number of universals declared before this binding (for `e` lines).
    universals_before: usize,
}

fn ints(line_no: usize, toks: &[&str]) -> Result<Vec<i64>, ParseError> {
    toks.iter()
        .map(|t| {
            t.parse::<i64>().map_err(|_| ParseError::MalformedLine {
                line: line_no,
                msg: format!("expected an integer, found `{t}`"),
            })
        })
        .collect()
}

/// Strips the terminating 0 and rejects embedded zeros.
fn zero_terminated(line_no: usize, mut vals: Vec<i64>) -> Result<Vec<i64>, ParseError> {
    if vals.pop() != Some(0) {
        return Err(ParseError::MalformedLine {
            line: line_no,
            msg: "missing terminating 0".into(),
        });
    }
    if vals.contains(&0) {
        return Err(ParseError::MalformedLine {
            line: line_no,
            msg: "0 inside a line".into(),
        });
    }
    Ok(vals)
}

fn checked_var(line: usize, v: i64, n_vars: u32) -> Result<Var, ParseError> {
    if v <= 0 {
        return Err(ParseError::MalformedLine {
            line,
            msg: format!("expected a positive variable, found {v}"),
        });
    }
    if v > i64::from(n_vars) {
        return Err(ParseError::UnknownVariable {
            line,
            var: v as u64,
        });
    }
    Ok(Var::new(v as u32))
}

pub fn parse_dqdimacs_with(text: &str, opts: ParseOptions) -> Result<DqbfFormula, ParseError> {
    let mut comments = Vec::new();
    let mut header: Option<(u32, usize)> = None;
    let mut bindings: BTreeMap<Var, Binding> = BTreeMap::new();
    let mut universal_order: Vec<Var> = Vec::new();
    // evar -> (deps as written, line)
    let mut dlines: BTreeMap<Var, (Vec<i64>, usize)> = BTreeMap::new();
    let mut clauses: Vec<(Vec<i64>, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "c" || line.starts_with("c ") || line.starts_with("c\t") {
            comments.push(line[1..].trim_start().to_string());
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "p" {
            if header.is_some() {
                return Err(ParseError::MalformedHeader {
                    line: line_no,
                    msg: "second problem line".into(),
                });
            }
            if toks.len() != 4 || toks[1] != "cnf" {
                return Err(ParseError::MalformedHeader {
                    line: line_no,
                    msg: "expected `p cnf <vars> <clauses>`".into(),
                });
            }
            let parse_count = |t: &str| {
                t.parse::<u64>().map_err(|_| ParseError::MalformedHeader {
                    line: line_no,
                    msg: format!("bad count `{t}`"),
                })
            };
            let nv = parse_count(toks[2])?;
            let nc = parse_count(toks[3])?;
            if nv >= u64::from(u32::MAX >> 1) {
                return Err(ParseError::MalformedHeader {
                    line: line_no,
                    msg: "variable count too large".into(),
                });
            }
            header = Some((nv as u32, nc as usize));
            continue;
        }
        let Some((n_vars, _)) = header else {
            return Err(ParseError::MalformedHeader {
                line: line_no,
                msg: "content before the `p cnf` line".into(),
            });
        };
        match toks[0] {
            "a" | "e" | "d" => {
                if !clauses.is_empty() {
                    return Err(ParseError::MalformedLine {
                        line: line_no,
                        msg: "quantifier line after clauses".into(),
                    });
                }
                let vals = zero_terminated(line_no, ints(line_no, &toks[1..])?)?;
                if toks[0] == "d" {
                    let Some((&head, deps)) = vals.split_first() else {
                        return Err(ParseError::MalformedLine {
                            line: line_no,
                            msg: "d-line without a variable".into(),
                        });
                    };
                    let y = checked_var(line_no, head, n_vars)?;
                    if dlines.contains_key(&y)
                        || bindings.get(&y).is_some_and(|b| b.kind == Quant::Universal)
                    {
                        return Err(ParseError::DuplicateQuantification {
                            line: line_no,
                            var: y.id(),
                        });
                    }
                    dlines.insert(y, (deps.to_vec(), line_no));
                } else {
                    let kind = if toks[0] == "a" {
                        Quant::Universal
                    } else {
                        Quant::Existential
                    };
                    for v in vals {
                        let var = checked_var(line_no, v, n_vars)?;
                        if bindings.contains_key(&var) || dlines.contains_key(&var) {
                            return Err(ParseError::DuplicateQuantification {
                                line: line_no,
                                var: var.id(),
                            });
                        }
                        bindings.insert(
                            var,
                            Binding {
                                kind,
                                universals_before: universal_order.len(),
                            },
                        );
                        if kind == Quant::Universal {
                            universal_order.push(var);
                        }
                    }
                }
            }
            _ => {
                let vals = zero_terminated(line_no, ints(line_no, &toks)?)?;
                for &l in &vals {
                    if l.unsigned_abs() > u64::from(n_vars) {
                        return Err(ParseError::UnknownVariable {
                            line: line_no,
                            var: l.unsigned_abs(),
                        });
                    }
                }
                clauses.push((vals, line_no));
            }
        }
    }

    let Some((n_vars, n_clauses)) = header else {
        return Err(ParseError::MalformedHeader {
            line: 0,
            msg: "missing `p cnf` line".into(),
        });
    };

    // Free variables: rejected, or bound as outermost universals.
    let mut outer: Vec<Var> = Vec::new();
    for (vals, line) in &clauses {
        for &l in vals {
            let v = Var::new(l.unsigned_abs() as u32);
            if !bindings.contains_key(&v) && !dlines.contains_key(&v) {
                if !opts.lenient {
                    return Err(ParseError::UnknownVariable {
                        line: *line,
                        var: u64::from(v.id()),
                    });
                }
                if !outer.contains(&v) {
                    outer.push(v);
                }
            }
        }
    }
    outer.sort_unstable();

    let is_universal =
        |v: Var| outer.contains(&v) || bindings.get(&v).is_some_and(|b| b.kind == Quant::Universal);

    let mut universals: Vec<Var> = universal_order.clone();
    universals.extend(outer.iter().copied());
    let mut deps: BTreeMap<Var, Vec<Var>> = BTreeMap::new();
    for (&v, b) in &bindings {
        if b.kind == Quant::Existential && !dlines.contains_key(&v) {
            let mut d: Vec<Var> = outer.clone();
            d.extend_from_slice(&universal_order[..b.universals_before]);
            deps.insert(v, d);
        }
    }
    for (&y, (raw, line)) in &dlines {
        let mut d = Vec::with_capacity(raw.len());
        for &u in raw {
            let var = checked_var(*line, u, n_vars)?;
            if is_universal(var) {
                d.push(var);
            } else if var == y || bindings.contains_key(&var) || dlines.contains_key(&var) {
                return Err(ParseError::DependencyOnNonUniversal {
                    line: *line,
                    evar: y.id(),
                    dep: var.id(),
                });
            } else {
                return Err(ParseError::UnknownVariable {
                    line: *line,
                    var: u64::from(var.id()),
                });
            }
        }
        deps.insert(y, d);
    }

    if clauses.len() != n_clauses {
        return Err(ParseError::ClauseCountMismatch {
            declared: n_clauses,
            found: clauses.len(),
        });
    }

    let prefix = Prefix::new_unchecked(universals, deps);
    let matrix = clauses
        .iter()
        .map(|(vals, _)| Clause::new(vals.iter().map(|&l| Lit::from_dimacs(l)).collect()))
        .collect();
    let mut f = DqbfFormula::new_unchecked(prefix, matrix, n_vars);
    f.comments = comments;
    Ok(f)
}

/// Canonical rendering: comments, header, one `a` line with all universals,
/// one `d` line per existential, then the clauses in matrix order.
pub fn print_dqdimacs(f: &DqbfFormula) -> String {
    let mut out = String::new();
    for c in &f.comments {
        if c.is_empty() {
            out.push_str("c\n");
        } else {
            let _ = writeln!(out, "c {c}");
        }
    }
    let _ = writeln!(out, "p cnf {} {}", f.n_declared(), f.num_clauses());
    let p = f.prefix();
    if !p.universals().is_empty() {
        out.push('a');
        for u in p.universals() {
            let _ = write!(out, " {u}");
        }
        out.push_str(" 0\n");
    }
    for (y, d) in p.dep_map() {
        let _ = write!(out, "d {y}");
        for u in d {
            let _ = write!(out, " {u}");
        }
        out.push_str(" 0\n");
    }
    for c in f.matrix() {
        let _ = writeln!(out, "{c}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::example_formula;

    const EXAMPLE: &str = "c running example\np cnf 6 5\na 1 2 3 0\nd 4 1 2 0\nd 5 2 3 0\nd 6 1 0\n4 1 0\n-4 2 0\n-5 -2 3 0\n6 -1 2 0\n-6 1 0\n";

    #[test]
    fn parses_example() {
        let f = parse_dqdimacs(EXAMPLE).unwrap();
        assert_eq!(f.prefix().universals().len(), 3);
        assert_eq!(f.prefix().num_existentials(), 3);
        assert_eq!(f.num_clauses(), 5);
        assert_eq!(f.comments, vec!["running example".to_string()]);
        assert_eq!(f.prefix(), example_formula().prefix());
        assert_eq!(f.matrix(), example_formula().matrix());
    }

    #[test]
    fn prints_example() {
        let text = print_dqdimacs(&example_formula());
        assert_eq!(text.lines().filter(|l| l.starts_with("d ")).count(), 3);
        assert!(text.contains("d 6 1 0\n"));
        assert!(text.starts_with("p cnf 6 5\na 1 2 3 0\n"));
        let back = parse_dqdimacs(&text).unwrap();
        assert_eq!(back, example_formula());
    }

    #[test]
    fn empty_formula() {
        let f = parse_dqdimacs("p cnf 0 0\n").unwrap();
        assert_eq!(f.num_clauses(), 0);
        assert_eq!(print_dqdimacs(&f), "p cnf 0 0\n");
    }

    #[test]
    fn linear_prefix_dependencies() {
        let f = parse_dqdimacs("p cnf 4 1\na 1 0\ne 2 0\na 3 0\ne 4 0\n2 4 1 3 0\n").unwrap();
        assert_eq!(f.prefix().deps(Var::new(2)), &[Var::new(1)]);
        assert_eq!(f.prefix().deps(Var::new(4)), &[Var::new(1), Var::new(3)]);
    }

    #[test]
    fn d_line_replaces_linear_dependencies() {
        let f = parse_dqdimacs("p cnf 3 0\na 1 2 0\ne 3 0\nd 3 2 0\n").unwrap();
        assert_eq!(f.prefix().deps(Var::new(3)), &[Var::new(2)]);
    }

    #[test]
    fn dependency_on_existential_rejected() {
        let err = parse_dqdimacs("p cnf 5 0\na 1 0\nd 4 5 0\nd 5 1 0\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::DependencyOnNonUniversal {
                line: 3,
                evar: 4,
                dep: 5
            }
        );
        let err = parse_dqdimacs("p cnf 4 0\na 1 0\nd 4 4 0\n").unwrap_err();
        assert!(matches!(err, ParseError::DependencyOnNonUniversal { .. }));
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            parse_dqdimacs("p dnf 1 0\n"),
            Err(ParseError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_dqdimacs("1 0\n"),
            Err(ParseError::MalformedHeader { .. })
        ));
        assert!(matches!(
            parse_dqdimacs("p cnf 2 1\na 1 0\n1 2 0\n"),
            Err(ParseError::UnknownVariable { line: 3, var: 2 })
        ));
        assert!(matches!(
            parse_dqdimacs("p cnf 2 1\na 1 0\n1 3 0\n"),
            Err(ParseError::UnknownVariable { var: 3, .. })
        ));
        assert!(matches!(
            parse_dqdimacs("p cnf 2 0\na 1 0\ne 1 2 0\n"),
            Err(ParseError::DuplicateQuantification { line: 3, var: 1 })
        ));
        assert!(matches!(
            parse_dqdimacs("p cnf 2 0\na 1 0\nd 2 1 0\nd 2 0\n"),
            Err(ParseError::DuplicateQuantification { line: 4, var: 2 })
        ));
        assert!(matches!(
            parse_dqdimacs("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n"),
            Err(ParseError::ClauseCountMismatch {
                declared: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_dqdimacs("p cnf 2 1\na 1 0\ne 2 0\n1 2\n"),
            Err(ParseError::MalformedLine { line: 4, .. })
        ));
    }

    #[test]
    fn lenient_mode_binds_free_variables_outermost() {
        let text = "p cnf 3 1\ne 2 0\nd 3 0\n1 2 3 0\n";
        assert!(parse_dqdimacs(text).is_err());
        let f = parse_dqdimacs_with(text, ParseOptions { lenient: true }).unwrap();
        assert!(f.prefix().is_universal(Var::new(1)));
        assert_eq!(f.prefix().deps(Var::new(2)), &[Var::new(1)]);
        assert!(f.prefix().deps(Var::new(3)).is_empty());
    }

    #[test]
    fn duplicate_literals_deduplicated_clauses_kept() {
        let f = parse_dqdimacs("p cnf 2 2\na 1 0\ne 2 0\n1 1 2 0\n2 1 0\n").unwrap();
        assert_eq!(f.clause(0).len(), 2);
        assert_eq!(f.clause(0), f.clause(1));
    }

    #[test]
    fn empty_clause_accepted() {
        let f = parse_dqdimacs("p cnf 1 1\na 1 0\n0\n").unwrap();
        assert!(f.clause(0).is_empty());
    }
}
