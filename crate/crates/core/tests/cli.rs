//! Exit-code contract of the command-line tool.

use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("causaltask-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causaltask"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const EXACTLY: &str = "task = refined\npromise = exactly_one\nD = 8\neps = 1\n";
const AT_LEAST: &str = "task = refined\npromise = at_least_one\nD = 8\neps = 1\n";

#[test]
fn refined_search_and_run() {
    let ex = scenario("exactly.txt", EXACTLY);
    let al = scenario("at_least.txt", AT_LEAST);
    let ex = ex.to_str().unwrap();
    let al = al.to_str().unwrap();

    let out = cli(&["--format", "machine", "search", ex]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("verdict=feasible\nwitness=5\n"));

    let out = cli(&["search", al, "--format", "machine"]);
    assert_eq!(code(&out), 1);
    assert_eq!(
        stdout(&out)
            .lines()
            .filter(|l| l.starts_with("strategy=") && l.contains(" fails_on="))
            .count(),
        16
    );

    assert_eq!(code(&cli(&["run", ex, "--pattern", "(0,1)"])), 0);
    assert_eq!(code(&cli(&["run", al, "--pattern", "(1,1)"])), 1);
    assert_eq!(code(&cli(&["run", ex, "--pattern", "(1,1)"])), 2);
}

#[test]
fn budget_exhaustion_exits_3() {
    let f = scenario("wide.txt", &format!("{AT_LEAST}states = 2\n"));
    let out = cli(&[
        "--format",
        "machine",
        "search",
        f.to_str().unwrap(),
        "--budget-ms",
        "0",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).starts_with("verdict=exhausted"));
}

#[test]
fn input_errors_exit_2_on_stderr() {
    let f = scenario("bad.txt", "task = original\nD = -3\n");
    let out = cli(&["validate", f.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2: D must be ≥ 1"));

    let out = cli(&["demo", "bogus"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("token-monotonicity"));

    assert_eq!(code(&cli(&["validate", "/nonexistent/file"])), 2);
    assert_eq!(code(&cli(&["frobnicate"])), 2);
}

#[test]
fn summoning_validate_and_token() {
    let good = scenario(
        "s.txt",
        "task = summoning\nmode = multiple\nstart = 0,2\npair = 1,0 -> 5,0\npair = 1,4 -> 5,4\n",
    );
    let tight = scenario(
        "tight.txt",
        "task = summoning\nmode = single\nstart = 0,2\npair = 1,0 -> 4,0\npair = 1,4 -> 4,4\n",
    );
    let invalid = scenario(
        "inv.txt",
        "task = summoning\nmode = single\nstart = 0,0\npair = 1,3 -> 2,3\n",
    );
    let good = good.to_str().unwrap();

    assert_eq!(code(&cli(&["validate", good])), 0);
    let out = cli(&["--format", "machine", "validate", invalid.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("pair=1 after_call=true after_start=false"));

    let out = cli(&["--format", "machine", "token", good]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("action=deliver"));
    assert_eq!(code(&cli(&["token", tight.to_str().unwrap()])), 1);
    assert_eq!(code(&cli(&["token", invalid.to_str().unwrap()])), 2);

    let out = cli(&["--format", "machine", "run", good, "--pattern", "{1,2}"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict=success"));
    assert_eq!(code(&cli(&["search", good])), 2);
}

#[test]
fn original_run_and_search() {
    let f = scenario("o.txt", "task = original\nD = 8\n");
    let f = f.to_str().unwrap();
    for relay in ["1", "4", "7"] {
        let out = cli(&[
            "--format",
            "machine",
            "run",
            f,
            "--pattern",
            "{1,2}",
            "--relay",
            relay,
        ]);
        assert_eq!(code(&out), 0);
        assert_eq!(
            stdout(&out)
                .lines()
                .filter(|l| l.contains("kind=deliver"))
                .count(),
            1
        );
    }
    assert_eq!(code(&cli(&["search", f])), 0);
}

#[test]
fn human_format_adds_summary() {
    let f = scenario("h.txt", EXACTLY);
    let human = stdout(&cli(&["search", f.to_str().unwrap()]));
    let machine = stdout(&cli(&[
        "search",
        f.to_str().unwrap(),
        "--format",
        "machine",
    ]));
    assert!(human.ends_with(&machine));
    assert!(human.len() > machine.len());
}
