use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::thread;
use std::time::{Duration, Instant};

use portsched::{run, Alignment, AttemptStatus, Error, RunOptions, Schedule, SolverCommand};

const UNIT: Duration = Duration::from_millis(100);
const JITTER: Duration = Duration::from_millis(60);

fn stub(id: &str, script: &str) -> SolverCommand {
    SolverCommand {
        id: id.into(),
        command: format!("sh -c '{script}' {{instance}}"),
        success_exit_codes: vec![],
        success_stdout: Some("^SAT".into()),
        env: BTreeMap::new(),
    }
}

fn schedule(entries: &[(&str, u64, usize)], units: usize) -> Schedule {
    let solvers: Vec<String> = entries.iter().map(|e| e.0.to_string()).collect();
    Schedule::new(
        solvers,
        entries.iter().map(|e| e.1).collect(),
        entries.iter().map(|e| Some(e.2)).collect(),
        units,
        20,
    )
    .unwrap()
}

fn options(run_dir: Option<&Path>) -> RunOptions {
    RunOptions {
        unit_duration: UNIT,
        grace: Duration::from_millis(100),
        run_dir: run_dir.map(Path::to_path_buf),
    }
}

fn alive(pid: u32) -> bool {
    match fs::read_to_string(format!("/proc/{pid}/stat")) {
        Err(_) => false,
        Ok(stat) => {
            let state = stat.rsplit(')').next().and_then(|rest| rest.trim().chars().next());
            !matches!(state, Some('Z') | Some('X'))
        }
    }
}

fn wait_dead(pid: u32) -> bool {
    let until = Instant::now() + Duration::from_secs(2);
    while Instant::now() < until {
        if !alive(pid) {
            return true;
        }
        thread::sleep(Duration::from_millis(10));
    }
    !alive(pid)
}

#[test]
fn instant_success_wins() {
    let s = schedule(&[("fast", 5, 0)], 1);
    let a = Alignment::name_order(&s);
    let result = run(
        &s,
        &a,
        &[stub("fast", "echo SAT")],
        Path::new("inst.cnf"),
        &options(None),
    )
    .unwrap();
    assert!(result.solved);
    let winner = result.winner.unwrap();
    assert_eq!((winner.unit, winner.solver.as_str()), (1, "fast"));
    assert_eq!(result.attempts.len(), 1);
    assert!(Duration::from_millis(result.attempts[0].elapsed_ms) < UNIT * 5);
    assert!(result.attempts[0].stdout.is_none());
}

#[test]
fn instance_path_reaches_the_command() {
    let dir = tempfile::tempdir().unwrap();
    let s = schedule(&[("echoer", 5, 0)], 1);
    let a = Alignment::name_order(&s);
    let cmd = stub("echoer", "echo SAT $0");
    let result = run(&s, &a, &[cmd], Path::new("/data/x.cnf"), &options(Some(dir.path()))).unwrap();
    let out = fs::read_to_string(result.attempts[0].stdout.as_ref().unwrap()).unwrap();
    assert_eq!(out.trim(), "SAT /data/x.cnf");
}

#[test]
fn sleepers_are_killed_at_their_slices() {
    let s = schedule(&[("a", 2, 0), ("b", 3, 0), ("stubborn", 2, 0)], 1);
    let a = Alignment::from_names(&s, &[&["a", "b", "stubborn"]]).unwrap();
    let cmds = [
        stub("a", "sleep 5; echo SAT"),
        stub("b", "sleep 5; echo SAT"),
        stub("stubborn", "trap \"\" TERM; sleep 5; echo SAT"),
    ];
    let opts = options(None);
    let result = run(&s, &a, &cmds, Path::new("inst"), &opts).unwrap();
    assert!(!result.solved);
    assert!(result.winner.is_none());
    assert_eq!(result.attempts.len(), 3);
    for attempt in &result.attempts {
        assert_eq!(attempt.status, AttemptStatus::TimedOut, "{attempt:?}");
        let elapsed = Duration::from_millis(attempt.elapsed_ms);
        let bound = UNIT * attempt.slice as u32 + opts.grace;
        assert!(
            elapsed <= bound + JITTER,
            "{} took {elapsed:?}, bound {bound:?}",
            attempt.solver
        );
        assert!(elapsed >= UNIT * attempt.slice as u32);
    }
    // the stubborn stub ignores SIGTERM and only stops at the hard kill
    assert!(Duration::from_millis(result.attempts[2].elapsed_ms) >= UNIT * 2 + opts.grace);
}

#[test]
fn late_success_does_not_count() {
    let s = schedule(&[("slow", 1, 0)], 1);
    let a = Alignment::name_order(&s);
    let cmd = stub("slow", "trap \"echo SAT; exit 0\" TERM; sleep 5 & wait");
    let result = run(&s, &a, &[cmd], Path::new("inst"), &options(None)).unwrap();
    assert!(!result.solved);
    assert_eq!(result.attempts[0].status, AttemptStatus::TimedOut);
}

#[test]
fn faster_unit_cancels_the_other() {
    let dir = tempfile::tempdir().unwrap();
    let s = schedule(&[("slow", 10, 0), ("quick", 10, 1)], 2);
    let a = Alignment::name_order(&s);
    let cmds = [
        stub("slow", "echo $$; sleep 3 & echo $!; sleep 0.5; echo SAT"),
        stub("quick", "sleep 0.1; echo SAT"),
    ];
    let result = run(&s, &a, &cmds, Path::new("inst"), &options(Some(dir.path()))).unwrap();
    assert!(result.solved);
    let winner = result.winner.clone().unwrap();
    assert_eq!((winner.unit, winner.solver.as_str()), (2, "quick"));
    let slow = result.attempts.iter().find(|a| a.solver == "slow").unwrap();
    assert_eq!(slow.status, AttemptStatus::Cancelled);
    assert_eq!(
        result
            .attempts
            .iter()
            .filter(|a| a.status == AttemptStatus::Succeeded)
            .count(),
        1
    );

    let out = fs::read_to_string(slow.stdout.as_ref().unwrap()).unwrap();
    let pids: Vec<u32> = out.lines().take(2).map(|l| l.trim().parse().unwrap()).collect();
    assert_eq!(pids.len(), 2);
    for pid in pids {
        assert!(wait_dead(pid), "process {pid} survived cancellation");
    }
}

#[test]
fn chain_stops_after_a_win() {
    let s = schedule(&[("first", 5, 0), ("second", 5, 0)], 1);
    let a = Alignment::from_names(&s, &[&["first", "second"]]).unwrap();
    let cmds = [stub("first", "echo SAT"), stub("second", "echo SAT")];
    let result = run(&s, &a, &cmds, Path::new("inst"), &options(None)).unwrap();
    assert_eq!(result.attempts.len(), 1);
    assert_eq!(result.winner.unwrap().solver, "first");
}

#[test]
fn spawn_failure_moves_on() {
    let s = schedule(&[("broken", 2, 0), ("works", 2, 0)], 1);
    let a = Alignment::from_names(&s, &[&["broken", "works"]]).unwrap();
    let broken = SolverCommand {
        command: "/nonexistent/solver {instance}".into(),
        ..stub("broken", "")
    };
    let result = run(
        &s,
        &a,
        &[broken, stub("works", "echo SAT")],
        Path::new("inst"),
        &options(None),
    )
    .unwrap();
    assert_eq!(result.attempts[0].status, AttemptStatus::SpawnError);
    assert!(result.attempts[0].error.is_some());
    assert!(result.solved);
    assert_eq!(result.winner.unwrap().solver, "works");
}

#[test]
fn exit_code_detector() {
    let s = schedule(&[("sat", 5, 0), ("plain", 5, 0)], 1);
    let a = Alignment::from_names(&s, &[&["plain", "sat"]]).unwrap();
    let by_code = |id: &str, script: &str| SolverCommand {
        success_exit_codes: vec![10, 20],
        success_stdout: None,
        ..stub(id, script)
    };
    let cmds = [by_code("plain", "exit 0"), by_code("sat", "exit 20")];
    let result = run(&s, &a, &cmds, Path::new("inst"), &options(None)).unwrap();
    assert_eq!(result.attempts[0].status, AttemptStatus::Failed);
    assert_eq!(result.attempts[0].exit_code, Some(0));
    assert_eq!(result.winner.unwrap().solver, "sat");
}

#[test]
fn missing_command_is_rejected_upfront() {
    let s = schedule(&[("known", 5, 0), ("unknown", 5, 0)], 1);
    let a = Alignment::name_order(&s);
    let err = run(&s, &a, &[stub("known", "echo SAT")], Path::new("inst"), &options(None)).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
}

#[test]
fn result_serializes() {
    let s = schedule(&[("fast", 5, 0)], 1);
    let a = Alignment::name_order(&s);
    let result = run(&s, &a, &[stub("fast", "echo SAT")], Path::new("inst"), &options(None)).unwrap();
    let json: serde_json::Value = serde_json::from_str(&result.to_json().unwrap()).unwrap();
    assert_eq!(json["solved"], true);
    assert_eq!(json["winner"]["solver"], "fast");
    assert_eq!(json["attempts"][0]["status"], "succeeded");
}
