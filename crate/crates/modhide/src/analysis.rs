//! Statement metrics and the external-toolchain harness.
//!
//! The metrics side is pure text analysis. The harness side shells out to a
//! Java compiler and launcher when one can be found — differential execution
//! compares exit codes and stdout bytes between a program and its rewritten
//! versions, and the benchmark times fresh-JVM runs. Everything degrades to
//! an explicit skip when no toolchain is installed.

use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::report::TimingRecord;
use crate::{lexer, rewrite, Error, Result};

/// Counts (contentful statements, statements containing an `F(...)` call).
/// Statement = token span ending at `;`, `{`, `}`, or a line break; spans of
/// pure punctuation or layout don't count.
pub fn count_statements(src: &str, path: &str) -> Result<(u32, u32)> {
    let tokens = lexer::lex(src, path)?;
    let calls = rewrite::f_call_spans(&tokens);
    let mut total = 0u32;
    let mut with_calls = 0u32;
    for span in lexer::statement_spans(&tokens) {
        if !lexer::span_has_content(&tokens, &span) {
            continue;
        }
        total += 1;
        if calls.iter().any(|c| span.contains(&c.start)) {
            with_calls += 1;
        }
    }
    Ok((total, with_calls))
}

/// Counts statements holding at least one literal the rewriter would pick up.
/// This is the projected obfuscated-statement figure for a source that has
/// not been rewritten yet.
pub fn eligible_statements(src: &str, path: &str) -> Result<u32> {
    let tokens = lexer::lex(src, path)?;
    let picked = rewrite::find_sites(&tokens, false)
        .iter()
        .filter(|s| s.excluded.is_none())
        .count();
    Ok(picked as u32)
}

/// Reverse-engineering effort: obfuscated statements times iterations.
pub fn re_effort(obfuscated_statements: u32, iterations: u32) -> u64 {
    obfuscated_statements as u64 * iterations as u64
}

// ---------------------------------------------------------------------------
// toolchain

/// Paths to a working `javac`/`java` pair.
#[derive(Debug, Clone)]
pub struct Toolchain {
    pub javac: PathBuf,
    pub java: PathBuf,
}

impl Toolchain {
    /// Looks in `jdk_home` if given (no fallback — an explicit path that
    /// doesn't work is better surfaced than silently replaced), then
    /// `$JAVA_HOME`, then the `PATH`.
    pub fn discover(jdk_home: Option<&Path>) -> Option<Toolchain> {
        let from_home = |home: &Path| {
            let javac = home.join("bin").join("javac");
            let java = home.join("bin").join("java");
            (javac.is_file() && java.is_file()).then_some(Toolchain { javac, java })
        };
        if let Some(home) = jdk_home {
            return from_home(home);
        }
        if let Ok(home) = std::env::var("JAVA_HOME") {
            if let Some(tc) = from_home(Path::new(&home)) {
                return Some(tc);
            }
        }
        let works = |name: &str| {
            Command::new(name)
                .arg("-version")
                .stdin(Stdio::null())
                .stdout(Stdio::null())
                .stderr(Stdio::null())
                .status()
                .is_ok_and(|s| s.success())
        };
        (works("javac") && works("java")).then_some(Toolchain {
            javac: PathBuf::from("javac"),
            java: PathBuf::from("java"),
        })
    }
}

/// One compile-and-run target: the sources compiled together and the class
/// whose `main` is launched.
#[derive(Debug, Clone)]
pub struct Program {
    pub main_class: String,
    /// (file name, source text); file names must match their class names.
    pub sources: Vec<(String, String)>,
    pub args: Vec<String>,
}

impl Program {
    pub fn new(main_class: impl Into<String>, sources: Vec<(String, String)>) -> Program {
        Program { main_class: main_class.into(), sources, args: Vec::new() }
    }
}

#[derive(Debug)]
pub struct ExecOutcome {
    pub exit: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

fn drain(reader: impl Read + Send + 'static) -> std::thread::JoinHandle<Vec<u8>> {
    std::thread::spawn(move || {
        let mut reader = reader;
        let mut buf = Vec::new();
        let _ = reader.read_to_end(&mut buf);
        buf
    })
}

/// Runs the command, killing it past `timeout`. Output is drained on
/// separate threads so a chatty child can't deadlock against a full pipe.
fn run_with_timeout(mut cmd: Command, timeout: Duration) -> Result<ExecOutcome> {
    cmd.stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().map_err(|e| Error::Toolchain {
        msg: format!("failed to launch {}: {e}", cmd.get_program().to_string_lossy()),
    })?;
    let stdout = drain(child.stdout.take().expect("stdout piped"));
    let stderr = drain(child.stderr.take().expect("stderr piped"));
    let started = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if started.elapsed() > timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(Error::Toolchain {
                msg: format!("{} timed out after {timeout:?}", cmd.get_program().to_string_lossy()),
            });
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    Ok(ExecOutcome {
        exit: status.code().unwrap_or(-1),
        stdout: stdout.join().unwrap_or_default(),
        stderr: stderr.join().unwrap_or_default(),
    })
}

/// Writes the program's sources into `dir` and compiles them there.
pub fn compile(tc: &Toolchain, dir: &Path, program: &Program) -> Result<()> {
    let mut cmd = Command::new(&tc.javac);
    cmd.arg("-d").arg(dir);
    for (name, text) in &program.sources {
        let path = dir.join(name);
        std::fs::write(&path, text)?;
        cmd.arg(path);
    }
    let out = run_with_timeout(cmd, Duration::from_secs(120))?;
    if out.exit != 0 {
        return Err(Error::Toolchain {
            msg: format!(
                "javac failed for {} (exit {}):\n{}",
                program.main_class,
                out.exit,
                String::from_utf8_lossy(&out.stderr)
            ),
        });
    }
    Ok(())
}

/// Launches the compiled program with a fresh JVM.
pub fn run_compiled(tc: &Toolchain, dir: &Path, program: &Program, timeout: Duration) -> Result<ExecOutcome> {
    let mut cmd = Command::new(&tc.java);
    cmd.arg("-cp").arg(dir).arg(&program.main_class).args(&program.args);
    run_with_timeout(cmd, timeout)
}

/// Compile + run in a throwaway directory.
pub fn exec_program(tc: &Toolchain, program: &Program, timeout: Duration) -> Result<ExecOutcome> {
    let dir = tempfile::tempdir()?;
    compile(tc, dir.path(), program)?;
    run_compiled(tc, dir.path(), program, timeout)
}

// ---------------------------------------------------------------------------
// differential execution

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiffVerdict {
    Pass,
    Fail(String),
    Skipped(String),
}

impl fmt::Display for DiffVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffVerdict::Pass => write!(f, "PASS"),
            DiffVerdict::Fail(d) => write!(f, "FAIL ({d})"),
            DiffVerdict::Skipped(r) => write!(f, "SKIPPED ({r})"),
        }
    }
}

/// Runs `original` once, then each variant, comparing exit code and stdout
/// bytes. Without a toolchain every variant is SKIPPED rather than guessed.
pub fn diff_exec(
    tc: Option<&Toolchain>,
    original: &Program,
    variants: &[Program],
    timeout: Duration,
) -> Vec<DiffVerdict> {
    let Some(tc) = tc else {
        return vec![DiffVerdict::Skipped("no Java toolchain found".into()); variants.len()];
    };
    let base = match exec_program(tc, original, timeout) {
        Ok(out) => out,
        Err(e) => return vec![DiffVerdict::Fail(format!("original failed: {e}")); variants.len()],
    };
    variants
        .iter()
        .map(|v| match exec_program(tc, v, timeout) {
            Ok(out) if out.exit == base.exit && out.stdout == base.stdout => DiffVerdict::Pass,
            Ok(out) => DiffVerdict::Fail(describe_difference(&base, &out)),
            Err(e) => DiffVerdict::Fail(e.to_string()),
        })
        .collect()
}

fn describe_difference(base: &ExecOutcome, got: &ExecOutcome) -> String {
    if base.exit != got.exit {
        return format!("exit {} vs {}", base.exit, got.exit);
    }
    let offset = base
        .stdout
        .iter()
        .zip(&got.stdout)
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| base.stdout.len().min(got.stdout.len()));
    format!(
        "stdout differs at byte {offset} (lengths {} vs {})",
        base.stdout.len(),
        got.stdout.len()
    )
}

// ---------------------------------------------------------------------------
// timing

/// Times fresh-JVM runs of both programs — compile once, run `reps` times
/// each, take medians. `Ok(None)` means no toolchain: a skip, not a failure.
pub fn bench(
    tc: Option<&Toolchain>,
    original: &Program,
    obfuscated: &Program,
    reps: u32,
    timeout: Duration,
) -> Result<Option<TimingRecord>> {
    if reps < 3 {
        return Err(Error::Config {
            msg: format!("benchmark needs at least 3 repetitions, got {reps}"),
        });
    }
    let Some(tc) = tc else { return Ok(None) };
    let time_runs = |program: &Program| -> Result<f64> {
        let dir = tempfile::tempdir()?;
        compile(tc, dir.path(), program)?;
        let mut samples = Vec::with_capacity(reps as usize);
        for _ in 0..reps {
            let started = Instant::now();
            let out = run_compiled(tc, dir.path(), program, timeout)?;
            let elapsed = started.elapsed().as_secs_f64() * 1e3;
            if out.exit != 0 {
                return Err(Error::Toolchain {
                    msg: format!(
                        "benchmark run of {} exited {}:\n{}",
                        program.main_class,
                        out.exit,
                        String::from_utf8_lossy(&out.stderr)
                    ),
                });
            }
            samples.push(elapsed);
        }
        Ok(median(&mut samples))
    };
    let original_ms = time_runs(original)?;
    let obfuscated_ms = time_runs(obfuscated)?;
    let ratio = obfuscated_ms / original_ms.max(1e-6);
    Ok(Some(TimingRecord { original_ms, obfuscated_ms, ratio }))
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn statement_counts_for_bundled_program() {
        let (normalized, _) = rewrite::normalize(corpus::LEAPYEARS, "l.java").unwrap();
        assert_eq!(count_statements(&normalized, "l.java").unwrap(), (10, 0));
        assert_eq!(count_statements("", "e.java").unwrap(), (0, 0));
    }

    #[test]
    fn statements_with_calls_are_counted_after_a_pass() {
        let chain = crate::moduli::ModulusChain::build(13, crate::moduli::ChainMode::Doubled).unwrap();
        let (normalized, _) = rewrite::normalize(corpus::LEAPYEARS, "l.java").unwrap();
        let cfg = rewrite::PassConfig {
            chain: &chain,
            style: crate::expr::LiftStyle::Unit,
            depth_min: 2,
            depth_max: 12,
            schedule: None,
            all_constants: false,
            suffix: "123",
            pass_seed: 1,
        };
        let out = rewrite::obfuscate_pass(&normalized, "l.java", &cfg).unwrap();
        let (total, with_calls) = count_statements(&out.text, "l.java").unwrap();
        assert_eq!(with_calls, 4);
        assert_eq!(total, 10);
    }

    #[test]
    fn effort_is_the_product_and_grows_linearly() {
        assert_eq!(re_effort(4, 2), 8);
        assert_eq!(re_effort(13, 3), 39);
        assert_eq!(re_effort(7, 0), 0);
        for s in 0..=100 {
            for n in 0..=100 {
                assert_eq!(re_effort(s, n + 1) - re_effort(s, n), s as u64);
            }
        }
    }

    #[test]
    fn missing_toolchain_skips_instead_of_failing() {
        let program = Program::new("x", vec![("x.java".into(), "class x {}".into())]);
        let verdicts = diff_exec(None, &program, std::slice::from_ref(&program), Duration::from_secs(1));
        assert_eq!(verdicts, vec![DiffVerdict::Skipped("no Java toolchain found".into())]);
        assert!(bench(None, &program, &program, 3, Duration::from_secs(1)).unwrap().is_none());
    }

    #[test]
    fn bench_enforces_minimum_repetitions() {
        let program = Program::new("x", vec![]);
        assert!(matches!(
            bench(None, &program, &program, 2, Duration::from_secs(1)),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn median_of_odd_and_even_sample_counts() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn explicit_jdk_home_is_authoritative() {
        let dir = tempfile::tempdir().unwrap();
        assert!(Toolchain::discover(Some(dir.path())).is_none());
    }
}
