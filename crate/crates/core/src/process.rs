//! Running external commands with a timeout.
//!
//! Command templates are shell snippets; every `{file}` is replaced by the
//! single-quoted path of the input file, and the result runs under `sh -c`.
//! A template without a placeholder gets the path appended.

use std::io::Read;
use std::path::Path;
use std::process::{Command, ExitStatus, Stdio};
use std::thread;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Exited(i32),
    Signaled(i32),
    TimedOut,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub termination: Termination,
    pub stdout: String,
    pub stderr: String,
    pub elapsed: Duration,
}

fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

pub fn expand_template(template: &str, file: &Path) -> String {
    let quoted = shell_quote(&file.to_string_lossy());
    if template.contains("{file}") {
        template.replace("{file}", &quoted)
    } else {
        format!("{template} {quoted}")
    }
}

fn termination(status: ExitStatus) -> Termination {
    if let Some(code) = status.code() {
        return Termination::Exited(code);
    }
    #[cfg(unix)]
    {
        use std::os::unix::process::ExitStatusExt;
        if let Some(sig) = status.signal() {
            return Termination::Signaled(sig);
        }
    }
    Termination::Exited(-1)
}

fn kill_group(child: &mut std::process::Child) {
    #[cfg(unix)]
    // SAFETY: plain syscall on the group we created for this child.
    unsafe {
        libc::kill(-(child.id() as libc::pid_t), libc::SIGKILL);
    }
    let _ = child.kill();
}

/// Runs `template` on `file`, killing the child after `timeout`.
pub fn run_template(
    template: &str,
    file: &Path,
    timeout: Option<Duration>,
) -> std::io::Result<RunOutcome> {
    let cmdline = expand_template(template, file);
    let start = Instant::now();
    let mut cmd = Command::new("sh");
    cmd.arg("-c")
        .arg(&cmdline)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        cmd.process_group(0);
    }
    let mut child = cmd.spawn()?;

    // Drain pipes on helper threads so a chatty child cannot block.
    let mut out_pipe = child.stdout.take().expect("piped stdout");
    let mut err_pipe = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = out_pipe.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = err_pipe.read_to_string(&mut s);
        s
    });

    let mut sleep = Duration::from_micros(200);
    let termination = loop {
        if let Some(status) = child.try_wait()? {
            break termination(status);
        }
        if timeout.is_some_and(|t| start.elapsed() >= t) {
            kill_group(&mut child);
            let _ = child.wait();
            break Termination::TimedOut;
        }
        thread::sleep(sleep);
        sleep = (sleep * 2).min(Duration::from_millis(20));
    };
    let elapsed = start.elapsed();
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    Ok(RunOutcome {
        termination,
        stdout,
        stderr,
        elapsed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placeholder_expansion() {
        let p = Path::new("/tmp/a b'c.cnf");
        assert_eq!(expand_template("cat {file}", p), r"cat '/tmp/a b'\''c.cnf'");
        assert_eq!(expand_template("wc -l", Path::new("/x")), "wc -l '/x'");
    }

    #[test]
    fn exit_codes_signals_and_timeouts() {
        let f = Path::new("/dev/null");
        let r = run_template("echo hi; exit 10", f, None).unwrap();
        assert_eq!(r.termination, Termination::Exited(10));
        assert_eq!(r.stdout.trim(), "hi");
        let r = run_template("kill -SEGV $$", f, None).unwrap();
        assert_eq!(r.termination, Termination::Signaled(11));
        let r = run_template("sleep 5; : {file}", f, Some(Duration::from_millis(50))).unwrap();
        assert_eq!(r.termination, Termination::TimedOut);
    }
}
