//! The `dqprep` command line. Payload goes to stdout (or `-o`), diagnostics
//! to stderr.
//!
//! Exit codes: 0 ok / valid, 1 invalid input or negative result, 2 usage or
//! environment error; `solve` answers 10 (SAT), 20 (UNSAT), 30 (over budget).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::autarky::{check_certificate, reduce_to_lean_kernel, AutarkySystemConfig, ReductionCertificate};
use crate::ddmin::{
    ddmin_clauses, ddmin_pipeline, shrink_structure, DdminError, Interestingness, InterestingnessSpec,
    ShrinkOptions, SignalMatch,
};
use crate::fuzz::{fuzz_campaign, generate, sweep_phase_transition_with, CampaignConfig, RandomModelParams};
use crate::model::{parse_dqdimacs_with, print_dqdimacs, validate, DqbfFormula, ParseOptions};
use crate::oracle::{solve_bruteforce, OracleBudget, SolveOutcome};
use crate::par::Exec;
use crate::sat::SatBackend;
use crate::symmetry::{build_lex_breaker, dump_generators, find_automorphisms, BreakerMode, SearchBudget};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_UNKNOWN: i32 = 30;

#[derive(Debug, Parser)]
#[command(name = "dqprep", version, about = "DQBF preprocessing, symmetry breaking, fuzzing and delta debugging")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalConfig {
    /// Output file; `-` for stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Seed for generation and randomized detector order.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest number of Skolem candidates the brute-force oracle may try.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_skolem: Option<u64>,
    /// Largest number of universal assignments the oracle may enumerate.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_assignments: Option<u64>,
    /// Wall-clock limit in seconds for oracle and SAT calls.
    #[arg(long, global = true, value_parser = positive_secs)]
    pub time_limit: Option<Duration>,
    /// External SAT solver command template (`{file}` is replaced by the
    /// DIMACS path).
    #[arg(long, global = true, env = "DQPREP_SAT_CMD")]
    pub sat_cmd: Option<String>,
    /// Run batch loops on the calling thread only.
    #[arg(long, global = true)]
    pub sequential: bool,
}

impl GlobalConfig {
    fn oracle_budget(&self) -> OracleBudget {
        let d = OracleBudget::default();
        OracleBudget {
            max_skolem_candidates: self.max_skolem.unwrap_or(d.max_skolem_candidates),
            max_universal_assignments: self.max_assignments.unwrap_or(d.max_universal_assignments),
            time_limit: self.time_limit,
        }
    }

    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }
}

fn positive_secs(s: &str) -> Result<Duration, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v <= 0.0 || !v.is_finite() {
        return Err("must be a positive number of seconds".into());
    }
    Ok(Duration::from_secs_f64(v))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and check a DQDIMACS file.
    Validate {
        /// Input file; `-` for stdin.
        input: PathBuf,
        /// Treat unquantified variables as outermost universals.
        #[arg(long)]
        lenient: bool,
    },
    /// Remove clauses touched by autarkies until none is found.
    Reduce(ReduceArgs),
    /// Replay a reduction certificate.
    CheckCert {
        original: PathBuf,
        kernel: PathBuf,
        cert: PathBuf,
    },
    /// Detect symmetries or add lex-leader breaking clauses.
    Symmetry(SymmetryArgs),
    /// Decide the formula with the brute-force oracle.
    Solve { input: PathBuf },
    /// Generate random instances, or run a target solver on them.
    Fuzz(FuzzArgs),
    /// SAT fraction against clause/variable ratio.
    Sweep(SweepArgs),
    /// Shrink an instance while it stays interesting.
    Ddmin(DdminArgs),
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Input file or directory of instances; `-` for stdin.
    pub input: PathBuf,
    /// Comma-separated detectors from e1, a0, a1, a2, e2.
    #[arg(long, default_value = "e1,a0,a1")]
    pub systems: String,
    /// Write the reduction certificate here.
    #[arg(long)]
    pub emit_cert: Option<PathBuf>,
    /// Report removed clauses and per-system step counts on stderr.
    #[arg(long)]
    pub stats: bool,
    /// Compile tautology witnesses once per clause orbit.
    #[arg(long)]
    pub symmetry: bool,
    /// Conflict limit per SAT call.
    #[arg(long)]
    pub max_conflicts: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SymmetryArgs {
    pub input: PathBuf,
    /// Print generators in cycle notation.
    #[arg(long, conflicts_with = "break_", required_unless_present = "break_")]
    pub detect: bool,
    /// Print the formula with breaking clauses added.
    #[arg(long = "break")]
    pub break_: bool,
    #[arg(long, default_value = "conservative")]
    pub mode: String,
    /// Search-tree node limit.
    #[arg(long, default_value_t = SearchBudget::default().max_nodes)]
    pub max_nodes: u64,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Number of universals.
    #[arg(long, default_value_t = 3)]
    pub na: u32,
    /// Number of existentials.
    #[arg(long, default_value_t = 2)]
    pub ne: u32,
    /// Probability that an existential depends on a given universal.
    #[arg(long, default_value_t = 0.5)]
    pub dep_prob: f64,
    /// Literals per clause.
    #[arg(long, default_value_t = 2)]
    pub width: usize,
    /// Every clause contains at least one existential literal.
    #[arg(long)]
    pub require_occurrence: bool,
}

impl ModelArgs {
    fn params(&self, n_clauses: usize, seed: u64) -> RandomModelParams {
        RandomModelParams {
            n_universal: self.na,
            n_existential: self.ne,
            dep_prob: self.dep_prob,
            n_clauses,
            clause_width: self.width,
            seed,
            require_occurrence: self.require_occurrence,
        }
    }
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of clauses.
    #[arg(long, short = 'm', default_value_t = 8)]
    pub clauses: usize,
    /// Number of instances; instance `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Directory for generated instances or saved failures.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Target solver command template; enables campaign mode.
    #[arg(long)]
    pub cmd: Option<String>,
    /// Skip the oracle comparison in campaign mode.
    #[arg(long)]
    pub no_oracle: bool,
    /// Per-run timeout in seconds for the target.
    #[arg(long, value_parser = positive_secs, default_value = "10")]
    pub run_timeout: Duration,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Clause/variable ratios.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,1.5,2,2.5,3,4")]
    pub ratios: Vec<f64>,
    /// Instances per ratio.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct DdminArgs {
    pub input: PathBuf,
    /// Target command template with a `{file}` placeholder.
    #[arg(long)]
    pub cmd: Option<String>,
    /// Exit codes that make a run interesting.
    #[arg(long, value_delimiter = ',')]
    pub interesting_exit: Vec<i32>,
    /// A signal death is interesting; optionally a specific signal number.
    #[arg(long, num_args = 0..=1, default_missing_value = "any")]
    pub interesting_signal: Option<String>,
    /// Substring that must appear on the target's stdout.
    #[arg(long)]
    pub grep: Option<String>,
    /// The target's SAT/UNSAT answer contradicts the oracle.
    #[arg(long)]
    pub oracle_mismatch: bool,
    /// A timed-out run is interesting.
    #[arg(long)]
    pub timeout_interesting: bool,
    /// Built-in predicate: the oracle decides UNSAT. Needs no target.
    #[arg(long, conflicts_with = "cmd")]
    pub oracle_unsat: bool,
    /// Per-run timeout in seconds.
    #[arg(long, value_parser = positive_secs, default_value = "10")]
    pub run_timeout: Duration,
    /// Total wall-clock budget in seconds.
    #[arg(long, value_parser = positive_secs)]
    pub budget: Option<Duration>,
    /// Where to write the reduced instance.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `clauses`, `structure` or `pipeline`.
    #[arg(long, default_value = "pipeline")]
    pub stage: String,
}

/// A failed command with its exit code; the message goes to stderr.
struct Fail(i32, String);

fn usage(msg: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, msg.into())
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(EXIT_INVALID, msg.into())
}

fn is_stdio(p: &Path) -> bool {
    p.as_os_str() == "-"
}

fn read_input(p: &Path) -> Result<String, Fail> {
    if is_stdio(p) {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))
}

fn parse_file(p: &Path, opts: ParseOptions) -> Result<DqbfFormula, Fail> {
    let text = read_input(p)?;
    let mut f = parse_dqdimacs_with(&text, opts).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
    if !is_stdio(p) {
        f.source_name = Some(p.display().to_string());
    }
    Ok(f)
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) if !is_stdio(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| usage(format!("stdout: {e}")))
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.global.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            eprintln!("dqprep: {msg}");
            code
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, Fail> {
    let g = &cli.global;
    let out = g.output.as_deref();
    match &cli.command {
        Command::Validate { input, lenient } => cmd_validate(input, *lenient, out),
        Command::Reduce(a) => cmd_reduce(a, g),
        Command::CheckCert { original, kernel, cert } => cmd_check_cert(original, kernel, cert, out),
        Command::Symmetry(a) => cmd_symmetry(a, out),
        Command::Solve { input } => cmd_solve(input, g),
        Command::Fuzz(a) => cmd_fuzz(a, g),
        Command::Sweep(a) => cmd_sweep(a, g),
        Command::Ddmin(a) => cmd_ddmin(a, g),
    }
}

fn cmd_validate(input: &Path, lenient: bool, out: Option<&Path>) -> Result<i32, Fail> {
    let f = parse_file(input, ParseOptions { lenient })?;
    let report = validate(&f);
    write_to(out, &report.to_string())?;
    if report.is_valid() {
        Ok(EXIT_OK)
    } else {
        for c in report.failures() {
            eprintln!("dqprep: check `{}` failed: {}", c.name, c.detail.as_deref().unwrap_or(""));
        }
        Ok(EXIT_INVALID)
    }
}

fn reduce_config(a: &ReduceArgs, g: &GlobalConfig) -> Result<AutarkySystemConfig, Fail> {
    let mut cfg = AutarkySystemConfig::from_systems(&a.systems).map_err(|e| usage(e.to_string()))?;
    cfg.use_symmetry_compilation = a.symmetry;
    cfg.shuffle_seed = g.seed;
    cfg.sat_limits.max_conflicts = a.max_conflicts;
    cfg.sat_limits.time_limit = g.time_limit;
    cfg.exec = g.exec();
    if let Some(cmd) = &g.sat_cmd {
        cfg.sat_backend = SatBackend::External(cmd.clone());
    }
    Ok(cfg)
}

/// `system -> (steps, clauses removed)` in first-seen order.
fn system_tally(cert: &ReductionCertificate) -> Vec<(String, usize, usize)> {
    let mut tally: Vec<(String, usize, usize)> = Vec::new();
    for s in &cert.steps {
        let name = s.system.clone().unwrap_or_else(|| "?".into());
        match tally.iter_mut().find(|t| t.0 == name) {
            Some(t) => {
                t.1 += 1;
                t.2 += s.removed.len();
            }
            None => tally.push((name, 1, s.removed.len())),
        }
    }
    tally
}

fn cmd_reduce(a: &ReduceArgs, g: &GlobalConfig) -> Result<i32, Fail> {
    let cfg = reduce_config(a, g)?;
    if a.input.is_dir() {
        return reduce_directory(&a.input, &cfg, g.output.as_deref());
    }
    let f = parse_file(&a.input, ParseOptions::default())?;
    let start = Instant::now();
    let (kernel, cert) = reduce_to_lean_kernel(&f, &cfg).map_err(|e| usage(e.to_string()))?;
    if let Some(p) = &a.emit_cert {
        write_to(Some(p), &cert.to_text())?;
    }
    if a.stats {
        eprintln!(
            "c removed {} of {} clauses in {} steps ({:.3}s)",
            f.num_clauses() - kernel.num_clauses(),
            f.num_clauses(),
            cert.steps.len(),
            start.elapsed().as_secs_f64()
        );
        for (name, steps, removed) in system_tally(&cert) {
            eprintln!("c system {name}: {steps} steps, {removed} clauses");
        }
        if cert.incomplete {
            eprintln!("c some detector hit a limit; the kernel may not be lean");
        }
    }
    write_to(g.output.as_deref(), &print_dqdimacs(&kernel))?;
    Ok(EXIT_OK)
}

/// One tally line per instance file, sorted by name.
fn reduce_directory(dir: &Path, cfg: &AutarkySystemConfig, out: Option<&Path>) -> Result<i32, Fail> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| usage(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut report = String::from("instance\tclauses\tkernel\tautarkies\tincomplete\tseconds\tsystems\n");
    let (mut nontrivial, mut failed) = (0usize, 0usize);
    for p in &files {
        let name = p.file_name().unwrap_or_default().to_string_lossy();
        let text = match fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                failed += 1;
                let _ = writeln!(report, "{name}\terror: {e}");
                continue;
            }
        };
        let f = match parse_dqdimacs_with(&text, ParseOptions::default()) {
            Ok(f) => f,
            Err(e) => {
                failed += 1;
                let _ = writeln!(report, "{name}\terror: {e}");
                continue;
            }
        };
        let start = Instant::now();
        match reduce_to_lean_kernel(&f, cfg) {
            Ok((kernel, cert)) => {
                if !cert.steps.is_empty() {
                    nontrivial += 1;
                }
                let systems: Vec<String> = system_tally(&cert)
                    .into_iter()
                    .map(|(n, s, _)| format!("{n}:{s}"))
                    .collect();
                let _ = writeln!(
                    report,
                    "{name}\t{}\t{}\t{}\t{}\t{:.3}\t{}",
                    f.num_clauses(),
                    kernel.num_clauses(),
                    cert.steps.len(),
                    cert.incomplete as u8,
                    start.elapsed().as_secs_f64(),
                    systems.join(",")
                );
            }
            Err(e) => {
                failed += 1;
                let _ = writeln!(report, "{name}\terror: {e}");
            }
        }
    }
    let _ = writeln!(
        report,
        "c {nontrivial} of {} instances have a non-trivial autarky; {failed} failed",
        files.len()
    );
    write_to(out, &report)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_INVALID })
}

fn cmd_check_cert(original: &Path, kernel: &Path, cert: &Path, out: Option<&Path>) -> Result<i32, Fail> {
    let o = parse_file(original, ParseOptions::default())?;
    let k = parse_file(kernel, ParseOptions::default())?;
    let text = read_input(cert)?;
    let c = ReductionCertificate::parse(&text).map_err(|e| invalid(format!("{}: {e}", cert.display())))?;
    let check = check_certificate(&o, &k, &c);
    if check.valid {
        write_to(out, &format!("c certificate valid ({} steps)\n", c.steps.len()))?;
        Ok(EXIT_OK)
    } else {
        let at = check.failed_step.map(|s| format!(" at step {}", s + 1)).unwrap_or_default();
        write_to(out, &format!("c certificate invalid{at}: {}\n", check.reason))?;
        Ok(EXIT_INVALID)
    }
}

fn cmd_symmetry(a: &SymmetryArgs, out: Option<&Path>) -> Result<i32, Fail> {
    let mode: BreakerMode = a.mode.parse().map_err(|e: crate::symmetry::BreakerError| usage(e.to_string()))?;
    let f = parse_file(&a.input, ParseOptions::default())?;
    let gens = find_automorphisms(&f, &SearchBudget { max_nodes: a.max_nodes });
    if !gens.complete {
        log::warn!("symmetry search stopped after {} nodes; generator list is partial", gens.nodes);
    }
    if a.detect {
        let text = if gens.generators.is_empty() {
            "c no generators found\n".to_string()
        } else {
            dump_generators(&gens.generators)
        };
        write_to(out, &text)?;
        return Ok(EXIT_OK);
    }
    let broken = build_lex_breaker(&f, &gens.generators, mode).map_err(|e| invalid(e.to_string()))?;
    write_to(out, &print_dqdimacs(&broken))?;
    Ok(EXIT_OK)
}

fn cmd_solve(input: &Path, g: &GlobalConfig) -> Result<i32, Fail> {
    let f = parse_file(input, ParseOptions::default())?;
    let (text, code) = match solve_bruteforce(&f, &g.oracle_budget()) {
        SolveOutcome::Sat(_) => ("s SATISFIABLE\n".to_string(), EXIT_SAT),
        SolveOutcome::Unsat => ("s UNSATISFIABLE\n".to_string(), EXIT_UNSAT),
        SolveOutcome::BudgetExceeded { log2_cost } => (
            format!("c estimated cost 2^{log2_cost:.1} exceeds the oracle budget\ns UNKNOWN\n"),
            EXIT_UNKNOWN,
        ),
    };
    write_to(g.output.as_deref(), &text)?;
    Ok(code)
}

fn cmd_fuzz(a: &FuzzArgs, g: &GlobalConfig) -> Result<i32, Fail> {
    let params = a.model.params(a.clauses, g.seed.unwrap_or(0));
    params.validate().map_err(|e| usage(e.to_string()))?;
    if let Some(cmd) = &a.cmd {
        let cfg = CampaignConfig {
            oracle_check: !a.no_oracle,
            out_dir: a.out_dir.clone(),
            run_timeout: Some(a.run_timeout),
            oracle_budget: g.oracle_budget(),
            exec: g.exec(),
            ..CampaignConfig::new(params, a.count, cmd.clone())
        };
        let report = fuzz_campaign(&cfg).map_err(|e| usage(e.to_string()))?;
        write_to(g.output.as_deref(), &report.to_string())?;
        return Ok(if report.failures().next().is_some() { EXIT_INVALID } else { EXIT_OK });
    }
    if a.count == 1 && a.out_dir.is_none() {
        let f = generate(&params).map_err(|e| invalid(e.to_string()))?;
        write_to(g.output.as_deref(), &print_dqdimacs(&f))?;
        return Ok(EXIT_OK);
    }
    let dir = a.out_dir.as_ref().ok_or_else(|| usage("--count > 1 needs --out-dir"))?;
    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    for i in 0..a.count {
        let p = params.with_seed(params.seed.wrapping_add(i as u64));
        let f = generate(&p).map_err(|e| invalid(format!("seed {}: {e}", p.seed)))?;
        let path = dir.join(format!("dqfuzz-seed{}.dqdimacs", p.seed));
        write_to(Some(&path), &print_dqdimacs(&f))?;
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &SweepArgs, g: &GlobalConfig) -> Result<i32, Fail> {
    let base = a.model.params(0, g.seed.unwrap_or(0));
    base.validate().map_err(|e| usage(e.to_string()))?;
    if a.ratios.iter().any(|r| r.is_nan() || *r < 0.0) {
        return Err(usage("ratios must be non-negative"));
    }
    let table = sweep_phase_transition_with(&base, &a.ratios, a.samples, &g.oracle_budget(), g.exec());
    write_to(g.output.as_deref(), &table.to_string())?;
    Ok(EXIT_OK)
}

fn interestingness(a: &DdminArgs, g: &GlobalConfig) -> Result<Box<dyn Interestingness>, Fail> {
    if a.oracle_unsat {
        let budget = g.oracle_budget();
        return Ok(Box::new(move |f: &DqbfFormula| solve_bruteforce(f, &budget).is_unsat()));
    }
    let cmd = a.cmd.clone().ok_or_else(|| usage("ddmin needs --cmd or --oracle-unsat"))?;
    let signal = match a.interesting_signal.as_deref() {
        None => None,
        Some("any") => Some(SignalMatch::Any),
        Some(s) => Some(SignalMatch::Exact(
            s.parse().map_err(|_| usage(format!("bad signal number `{s}`")))?,
        )),
    };
    let spec = InterestingnessSpec {
        exit_codes: a.interesting_exit.clone(),
        signal,
        grep: a.grep.clone(),
        oracle_mismatch: a.oracle_mismatch,
        timeout_interesting: a.timeout_interesting,
        per_run_timeout: a.run_timeout,
        total_budget: a.budget,
        oracle_budget: g.oracle_budget(),
        ..InterestingnessSpec::new(cmd)
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    Ok(Box::new(spec))
}

fn cmd_ddmin(a: &DdminArgs, g: &GlobalConfig) -> Result<i32, Fail> {
    let pred = interestingness(a, g)?;
    let f = parse_file(&a.input, ParseOptions::default())?;
    let opts = ShrinkOptions {
        budget: a.budget,
        exec: g.exec(),
    };
    let stage = match a.stage.as_str() {
        "clauses" => ddmin_clauses,
        "structure" => shrink_structure,
        "pipeline" => ddmin_pipeline,
        other => return Err(usage(format!("unknown stage `{other}`"))),
    };
    let result = match stage(&f, pred.as_ref(), &opts) {
        Ok(r) => r,
        Err(e @ (DdminError::NotInterestingInitially | DdminError::NotInterestingFinally)) => {
            return Err(invalid(e.to_string()))
        }
        Err(e) => return Err(usage(e.to_string())),
    };
    for p in &result.passes {
        eprintln!("c pass {}: {} accepted of {} tried", p.name, p.accepted, p.attempts);
    }
    eprintln!(
        "c {} -> {} clauses, {} tests, {} cache hits{}",
        f.num_clauses(),
        result.reduced.num_clauses(),
        result.tests_run,
        result.cache_hits,
        if result.budget_hit { ", budget hit" } else { "" }
    );
    let dest = a.out.as_deref().or(g.output.as_deref());
    write_to(dest, &print_dqdimacs(&result.reduced))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_subcommands() {
        let c = Cli::try_parse_from(["dqprep", "reduce", "x.dqdimacs", "--systems", "e1,a2", "--stats"]).unwrap();
        assert!(matches!(c.command, Command::Reduce(ref r) if r.stats && r.systems == "e1,a2"));
        let c = Cli::try_parse_from(["dqprep", "ddmin", "x", "--cmd", "t {file}", "--interesting-exit", "1,3", "--interesting-signal"]).unwrap();
        match c.command {
            Command::Ddmin(d) => {
                assert_eq!(d.interesting_exit, vec![1, 3]);
                assert_eq!(d.interesting_signal.as_deref(), Some("any"));
            }
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn usage_errors() {
        assert!(Cli::try_parse_from(["dqprep", "symmetry", "x", "--detect", "--break"]).is_err());
        assert!(Cli::try_parse_from(["dqprep", "symmetry", "x"]).is_err());
        assert!(Cli::try_parse_from(["dqprep", "solve", "x", "--max-skolem", "0"]).is_err());
        assert!(Cli::try_parse_from(["dqprep", "solve", "x", "--time-limit", "-1"]).is_err());
        assert_eq!(run(["dqprep", "validate", "/nonexistent/file"]), EXIT_USAGE);
    }
}
