//! Runs a schedule against real solver processes.
//!
//! Every unit gets a worker thread that starts its solvers one after another
//! in alignment order. Each child runs in its own process group. At the end
//! of its slice the group receives SIGTERM, and SIGKILL once the grace
//! period is over too. An attempt counts as a success only if the child
//! finishes inside its slice and its success detector matches. The first
//! success stops every other worker.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{Alignment, Schedule};

pub const PLACEHOLDER: &str = "{instance}";
const POLL: Duration = Duration::from_millis(5);

/// How to launch one solver and recognize that it succeeded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverCommand {
    pub id: String,
    /// Shell-style argument list containing `{instance}` exactly once.
    pub command: String,
    /// Exit codes that count as success; empty means any code.
    #[serde(default)]
    pub success_exit_codes: Vec<i32>,
    /// Pattern that must match somewhere in stdout.
    #[serde(default)]
    pub success_stdout: Option<String>,
    #[serde(default)]
    pub env: BTreeMap<String, String>,
}

impl SolverCommand {
    pub fn validate(&self) -> Result<()> {
        let count = self.command.matches(PLACEHOLDER).count();
        if count != 1 {
            return Err(Error::Config(format!(
                "command of `{}` must contain {PLACEHOLDER} exactly once, found {count}",
                self.id
            )));
        }
        if self.success_exit_codes.is_empty() && self.success_stdout.is_none() {
            return Err(Error::Config(format!("solver `{}` has no success detector", self.id)));
        }
        if let Some(pattern) = &self.success_stdout {
            Regex::new(pattern).map_err(|e| Error::Config(format!("stdout pattern of `{}`: {e}", self.id)))?;
        }
        self.argv(Path::new("x"))?;
        Ok(())
    }

    /// Program and arguments with the instance path substituted.
    pub fn argv(&self, instance: &Path) -> Result<Vec<String>> {
        let words =
            shell_words::split(&self.command).map_err(|e| Error::Config(format!("command of `{}`: {e}", self.id)))?;
        if words.is_empty() {
            return Err(Error::Config(format!("command of `{}` is empty", self.id)));
        }
        let path = instance.to_string_lossy();
        Ok(words.into_iter().map(|w| w.replace(PLACEHOLDER, &path)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CommandFile {
    #[serde(rename = "solver", default)]
    solvers: Vec<SolverCommand>,
}

/// Reads `[[solver]]` tables from TOML, or `{"solver": [...]}` from JSON.
pub fn parse_commands(text: &str, json: bool) -> Result<Vec<SolverCommand>> {
    let file: CommandFile = if json {
        serde_json::from_str(text)?
    } else {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
    };
    for cmd in &file.solvers {
        cmd.validate()?;
    }
    Ok(file.solvers)
}

/// [`parse_commands`] on a file; `.json` files are read as JSON, all others
/// as TOML.
pub fn load_commands(path: &Path) -> Result<Vec<SolverCommand>> {
    let text = fs::read_to_string(path)?;
    let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    parse_commands(&text, json)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    /// Wall-clock length of one slice time unit.
    pub unit_duration: Duration,
    pub grace: Duration,
    /// Keeps captured output here; otherwise it goes to a temporary
    /// directory that is removed afterwards.
    pub run_dir: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            unit_duration: Duration::from_secs(1),
            grace: Duration::from_secs(1),
            run_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttemptStatus {
    Succeeded,
    /// Finished inside its slice without matching the detector.
    Failed,
    TimedOut,
    Cancelled,
    SpawnError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    /// One-based unit number.
    pub unit: usize,
    /// One-based position on the unit.
    pub position: usize,
    pub solver: String,
    pub slice: u64,
    pub status: AttemptStatus,
    pub exit_code: Option<i32>,
    pub signal: Option<i32>,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stdout: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Winner {
    /// One-based unit number.
    pub unit: usize,
    pub solver: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub solved: bool,
    pub winner: Option<Winner>,
    /// Unit-major, in start order within each unit.
    pub attempts: Vec<Attempt>,
    pub elapsed_ms: u64,
}

impl RunResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

struct Shared {
    cancel: AtomicBool,
    winner: Mutex<Option<Winner>>,
}

/// Runs `schedule` in `alignment` order on `instance`.
pub fn run(
    schedule: &Schedule,
    alignment: &Alignment,
    commands: &[SolverCommand],
    instance: &Path,
    opts: &RunOptions,
) -> Result<RunResult> {
    alignment.validate(schedule)?;
    let by_id: BTreeMap<&str, &SolverCommand> = commands.iter().map(|c| (c.id.as_str(), c)).collect();
    for s in schedule.scheduled() {
        let name = schedule.solvers()[s].as_str();
        let cmd = by_id
            .get(name)
            .ok_or_else(|| Error::Config(format!("no command configured for solver `{name}`")))?;
        cmd.validate()?;
    }

    let temp;
    let out_dir: &Path = match &opts.run_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            dir
        }
        None => {
            temp = tempfile::tempdir()?;
            temp.path()
        }
    };
    let keep_paths = opts.run_dir.is_some();
    let shared = Shared {
        cancel: AtomicBool::new(false),
        winner: Mutex::new(None),
    };
    let start = Instant::now();
    let mut per_unit: Vec<Vec<Attempt>> = thread::scope(|scope| {
        let handles: Vec<_> = alignment
            .units()
            .iter()
            .enumerate()
            .map(|(u, order)| {
                let shared = &shared;
                let by_id = &by_id;
                scope.spawn(move || {
                    let mut attempts = Vec::new();
                    for (pos, &s) in order.iter().enumerate() {
                        if shared.cancel.load(Ordering::SeqCst) {
                            break;
                        }
                        let name = &schedule.solvers()[s];
                        let job = Job {
                            unit: u + 1,
                            position: pos + 1,
                            solver: name,
                            slice: schedule.slice(s),
                            budget: opts
                                .unit_duration
                                .saturating_mul(schedule.slice(s).min(u32::MAX as u64) as u32),
                            grace: opts.grace,
                            cmd: by_id[name.as_str()],
                            instance,
                            out_dir,
                            keep_paths,
                        };
                        let attempt = job.execute(shared);
                        let won = attempt.status == AttemptStatus::Succeeded;
                        attempts.push(attempt);
                        if won {
                            break;
                        }
                    }
                    attempts
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("unit worker panicked"))
            .collect()
    });
    let winner = shared.winner.into_inner().expect("winner lock poisoned");
    Ok(RunResult {
        solved: winner.is_some(),
        winner,
        attempts: per_unit.drain(..).flatten().collect(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

struct Job<'a> {
    unit: usize,
    position: usize,
    solver: &'a str,
    slice: u64,
    budget: Duration,
    grace: Duration,
    cmd: &'a SolverCommand,
    instance: &'a Path,
    out_dir: &'a Path,
    keep_paths: bool,
}

fn signal_group(child: &Child, signal: libc::c_int) {
    // SAFETY: kill(2) with a negative pid signals the process group the
    // child leads; it has no memory-safety preconditions.
    unsafe {
        libc::kill(-(child.id() as libc::pid_t), signal);
    }
}

impl Job<'_> {
    fn execute(&self, shared: &Shared) -> Attempt {
        let stem: String = format!("u{}-p{}-{}", self.unit, self.position, self.solver)
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect();
        let stdout_path = self.out_dir.join(format!("{stem}.stdout"));
        let stderr_path = self.out_dir.join(format!("{stem}.stderr"));
        let mut attempt = Attempt {
            unit: self.unit,
            position: self.position,
            solver: self.solver.to_string(),
            slice: self.slice,
            status: AttemptStatus::SpawnError,
            exit_code: None,
            signal: None,
            elapsed_ms: 0,
            error: None,
            stdout: self.keep_paths.then(|| stdout_path.clone()),
            stderr: self.keep_paths.then(|| stderr_path.clone()),
        };

        let started = Instant::now();
        let child = self.spawn(&stdout_path, &stderr_path);
        let mut child = match child {
            Ok(child) => child,
            Err(e) => {
                attempt.error = Some(e.to_string());
                attempt.elapsed_ms = started.elapsed().as_millis() as u64;
                return attempt;
            }
        };

        let term_at = started + self.budget;
        let kill_at = term_at + self.grace;
        let mut terminated = false;
        let mut cancelled = false;
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break Some(status),
                Ok(None) => {}
                Err(e) => {
                    attempt.error = Some(e.to_string());
                    break None;
                }
            }
            let now = Instant::now();
            if !cancelled && shared.cancel.load(Ordering::SeqCst) {
                cancelled = true;
                signal_group(&child, libc::SIGKILL);
            } else if now >= kill_at {
                signal_group(&child, libc::SIGKILL);
            } else if now >= term_at && !terminated {
                terminated = true;
                signal_group(&child, libc::SIGTERM);
            }
            let next = if now < term_at { term_at } else { kill_at };
            thread::sleep(
                POLL.min(next.saturating_duration_since(now))
                    .max(Duration::from_micros(200)),
            );
        };
        let finished = Instant::now();
        // grandchildren left behind by the solver go down with the group
        signal_group(&child, libc::SIGKILL);
        attempt.elapsed_ms = finished.duration_since(started).as_millis() as u64;

        let Some(status) = status else {
            let _ = child.kill();
            let _ = child.wait();
            return attempt;
        };
        attempt.exit_code = status.code();
        attempt.signal = status.signal();
        attempt.status = if cancelled {
            AttemptStatus::Cancelled
        } else if finished > term_at || terminated {
            AttemptStatus::TimedOut
        } else if self.detects_success(status.code(), &stdout_path) {
            AttemptStatus::Succeeded
        } else {
            AttemptStatus::Failed
        };
        if attempt.status == AttemptStatus::Succeeded {
            let mut winner = shared.winner.lock().expect("winner lock poisoned");
            if winner.is_none() {
                *winner = Some(Winner {
                    unit: self.unit,
                    solver: self.solver.to_string(),
                });
            }
            shared.cancel.store(true, Ordering::SeqCst);
        }
        attempt
    }

    fn spawn(&self, stdout: &Path, stderr: &Path) -> Result<Child> {
        let argv = self.cmd.argv(self.instance)?;
        let mut command = Command::new(&argv[0]);
        command
            .args(&argv[1..])
            .envs(&self.cmd.env)
            .stdin(Stdio::null())
            .stdout(File::create(stdout)?)
            .stderr(File::create(stderr)?)
            .process_group(0);
        Ok(command.spawn()?)
    }

    fn detects_success(&self, code: Option<i32>, stdout: &Path) -> bool {
        let code_ok =
            self.cmd.success_exit_codes.is_empty() || code.is_some_and(|c| self.cmd.success_exit_codes.contains(&c));
        let text_ok = match &self.cmd.success_stdout {
            None => true,
            Some(pattern) => {
                let re = Regex::new(pattern).expect("validated before the run");
                fs::read_to_string(stdout).is_ok_and(|text| re.is_match(&text))
            }
        };
        code_ok && text_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmd(id: &str, command: &str) -> SolverCommand {
        SolverCommand {
            id: id.into(),
            command: command.into(),
            success_exit_codes: vec![0],
            success_stdout: None,
            env: BTreeMap::new(),
        }
    }

    #[test]
    fn placeholder_rules() {
        assert!(cmd("a", "echo {instance}").validate().is_ok());
        assert!(matches!(cmd("a", "echo").validate(), Err(Error::Config(_))));
        assert!(matches!(
            cmd("a", "cat {instance} {instance}").validate(),
            Err(Error::Config(_))
        ));
        let mut silent = cmd("a", "echo {instance}");
        silent.success_exit_codes.clear();
        assert!(matches!(silent.validate(), Err(Error::Config(_))));
        assert!(matches!(
            cmd("a", "echo 'unterminated {instance}").validate(),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn argv_substitution() {
        let c = cmd("a", "solver --file={instance} -q 'two words'");
        assert_eq!(
            c.argv(Path::new("/tmp/x y.cnf")).unwrap(),
            vec!["solver", "--file=/tmp/x y.cnf", "-q", "two words"]
        );
    }

    #[test]
    fn config_formats() {
        let toml = r#"
[[solver]]
id = "s1"
command = "sat {instance}"
success_exit_codes = [10, 20]

[[solver]]
id = "s2"
command = "asp {instance}"
success_stdout = "^SATISFIABLE"
[solver.env]
SEED = "1"
"#;
        let cmds = parse_commands(toml, false).unwrap();
        assert_eq!(cmds.len(), 2);
        assert_eq!(cmds[0].success_exit_codes, vec![10, 20]);
        assert_eq!(cmds[1].env["SEED"], "1");
        let json = r#"{"solver":[{"id":"s1","command":"sat {instance}","success_exit_codes":[0]}]}"#;
        assert_eq!(parse_commands(json, true).unwrap()[0].id, "s1");
        assert!(parse_commands(r#"{"solver":[{"id":"s1","command":"sat"}]}"#, true).is_err());
    }
}
