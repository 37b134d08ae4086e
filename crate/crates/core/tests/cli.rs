use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn dqprep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqprep"))
        .args(args)
        .env_remove("DQPREP_SAT_CMD")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(dqprep(&["validate", path(&fixture("example.dqdimacs"))]).status.code(), Some(0));
    let bad = dqprep(&["validate", path(&fixture("bad_dline.dqdimacs"))]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));
    assert!(bad.stdout.is_empty());
    assert_eq!(dqprep(&["validate", "/no/such/file"]).status.code(), Some(2));
    assert_eq!(dqprep(&["validate"]).status.code(), Some(2));
}

#[test]
fn reduce_and_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = dir.path().join("kernel.dqdimacs");
    let cert = dir.path().join("kernel.cert");
    let example = fixture("example.dqdimacs");
    let o = dqprep(&[
        "reduce",
        path(&example),
        "--systems",
        "e1,a0,a1,a2,e2",
        "--emit-cert",
        path(&cert),
        "--stats",
        "-o",
        path(&kernel),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("removed 3 of 5 clauses"));
    let k = fs::read_to_string(&kernel).unwrap();
    assert!(k.contains("p cnf 6 2\n"));
    assert_eq!(fs::read_to_string(&cert).unwrap().matches("\nautarky\n").count(), 2);
    let ok = dqprep(&["check-cert", path(&example), path(&kernel), path(&cert)]);
    assert_eq!(ok.status.code(), Some(0));

    // the wrong original is rejected
    let swap = fixture("swap.dqdimacs");
    assert_eq!(dqprep(&["check-cert", path(&swap), path(&kernel), path(&cert)]).status.code(), Some(1));
}

#[test]
fn lean_input_is_printed_canonically() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = dir.path().join("k");
    let cert = dir.path().join("c");
    dqprep(&["reduce", path(&fixture("example.dqdimacs")), "-o", path(&kernel)]);
    let again = dqprep(&["reduce", path(&kernel), "--emit-cert", path(&cert)]);
    assert_eq!(stdout(&again), fs::read_to_string(&kernel).unwrap());
    assert!(!fs::read_to_string(&cert).unwrap().contains("autarky"));
}

#[test]
fn stdin_and_stdout() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dqprep"))
        .args(["solve", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(fs::read(fixture("example.dqdimacs")).unwrap().as_slice())
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(20));
    assert_eq!(stdout(&o), "s UNSATISFIABLE\n");
}

#[test]
fn solve_exit_codes() {
    assert_eq!(dqprep(&["solve", path(&fixture("example.dqdimacs"))]).status.code(), Some(20));
    assert_eq!(dqprep(&["solve", path(&fixture("empty_matrix.dqdimacs"))]).status.code(), Some(10));
    let over = dqprep(&["solve", path(&fixture("example.dqdimacs")), "--max-skolem", "1"]);
    assert_eq!(over.status.code(), Some(30));
    assert!(stdout(&over).contains("estimated cost 2^"));
}

#[test]
fn symmetry_subcommand() {
    let swap = dqprep(&["symmetry", "--detect", path(&fixture("swap.dqdimacs"))]);
    assert_eq!(stdout(&swap), "( 2 3 ) ( -2 -3 )\n");
    let none = dqprep(&["symmetry", "--detect", path(&fixture("example.dqdimacs"))]);
    assert_eq!(stdout(&none), "c no generators found\n");
    let example = fixture("example.dqdimacs");
    let broken = dqprep(&["symmetry", "--break", path(&example)]);
    let canonical = dqprep(&["reduce", path(&example), "--systems", ""]);
    assert_eq!(stdout(&broken), stdout(&canonical));
    let added = dqprep(&["symmetry", "--break", path(&fixture("swap.dqdimacs"))]);
    assert!(stdout(&added).ends_with("-2 3 0\n"));
}

#[test]
fn fuzz_is_deterministic() {
    let a = dqprep(&["fuzz", "--seed", "9", "--na", "3", "--ne", "3", "-m", "6"]);
    let b = dqprep(&["fuzz", "--seed", "9", "--na", "3", "--ne", "3", "-m", "6"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("c dqfuzz seed=9 na=3 ne=3"));

    let dir = tempfile::tempdir().unwrap();
    let o = dqprep(&["fuzz", "--count", "4", "--out-dir", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 4);
    assert_eq!(dqprep(&["fuzz", "--count", "4"]).status.code(), Some(2));
}

#[test]
fn fuzz_campaign_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = dqprep(&[
        "fuzz",
        "--count",
        "5",
        "--cmd",
        "kill -SEGV $$; : {file}",
        "--out-dir",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("crash: 5"));
}

#[test]
fn sweep_table() {
    let o = dqprep(&["sweep", "--samples", "10", "--ratios", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().nth(1).unwrap().contains("1.0000"));
}

#[test]
fn ddmin_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("min.dqdimacs");
    let example = fixture("example.dqdimacs");
    let o = dqprep(&["ddmin", path(&example), "--oracle-unsat", "--stage", "clauses", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.ends_with("1 4 0\n2 -4 0\n"), "{text}");

    // a target that wrongly claims SAT on everything
    let o = dqprep(&["ddmin", path(&example), "--cmd", "exit 10; : {file}", "--oracle-mismatch"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(dqprep(&["ddmin", path(&example), "--cmd", "true {file}"]).status.code(), Some(2));
    let boring = dqprep(&["ddmin", path(&example), "--cmd", "exit 0; : {file}", "--interesting-exit", "3"]);
    assert_eq!(boring.status.code(), Some(1));
}

#[test]
fn reduce_directory_tally() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("example.dqdimacs"), dir.path().join("a.dqdimacs")).unwrap();
    fs::copy(fixture("swap.dqdimacs"), dir.path().join("b.dqdimacs")).unwrap();
    let o = dqprep(&["reduce", path(dir.path()), "--stats"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("a.dqdimacs\t5\t2\t2\t"));
    assert!(out.contains("of 2 instances have a non-trivial autarky"));
}
