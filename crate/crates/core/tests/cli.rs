use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn nsbandit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsbandit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn simulate_writes_runs_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("abrupt.csv");
    let status = nsbandit(&[
        "simulate",
        "--env",
        "abrupt",
        "--policy",
        "adr-ts,ducb",
        "--K",
        "10",
        "--T",
        "900",
        "--L",
        "2",
        "--runs",
        "3",
        "--seed",
        "4",
        "--delta",
        "0.01",
        "--param",
        "gamma=0.95",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );

    let runs = read(&out);
    let mut lines = runs.lines();
    assert_eq!(lines.next(), Some("policy,run,t,metric,value"));
    // 900 rounds at the default cadence of 1, two metrics, three runs, two policies
    assert_eq!(lines.count(), 900 * 2 * 3 * 2);
    assert!(runs.contains("adr-ts,2,900,resets,"));

    let summary = read(&dir.path().join("abrupt_summary.csv"));
    assert!(summary.starts_with("policy,t,metric,mean,std\n"));
    assert_eq!(summary.lines().count(), 1 + 900 * 2 * 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(
        &cfg,
        format!(
            "# stationary sweep\nenv = stationary\npolicy = ts\nK = 5\nT = 300\nruns = 2\nout = {}\n",
            a.display()
        ),
    )
    .unwrap();
    assert!(nsbandit(&["simulate", "--config", cfg.to_str().unwrap()])
        .status
        .success());
    assert!(read(&a).contains("ts,1,300,regret,"));

    let status = nsbandit(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--policy",
        "klucb",
        "--T",
        "200",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let text = read(&b);
    assert!(text.contains("klucb,1,200,regret,"));
    assert!(text.lines().skip(1).all(|l| l.starts_with("klucb,")));
}

#[test]
fn replay_environment_reports_reward() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.csv");
    let mut body = String::from("t,arm,reward\n");
    for i in 0..400 {
        body.push_str(&format!("{},{},{}\n", i, 1 + i % 4, u8::from(i % 4 == 0)));
    }
    std::fs::write(&log, body).unwrap();
    let out = dir.path().join("replay.csv");
    let env = format!("replay:{}", log.display());
    let status = nsbandit(&[
        "simulate",
        "--env",
        &env,
        "--policy",
        "ts",
        "--L",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    // with L = K every event matches, so the final reward is the log total
    assert!(read(&out).contains("ts,0,400,reward,100\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    let code = |args: &[&str]| nsbandit(args).status.code();

    assert_eq!(
        code(&["simulate", "--env", "abrupt", "--policy", "nope", "--T", "10", "--out", out]),
        Some(2)
    );
    assert_eq!(
        code(&["simulate", "--env", "weird", "--policy", "ts", "--T", "10", "--out", out]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "simulate", "--env", "abrupt", "--policy", "ts", "--K", "3", "--L", "4", "--T", "10",
            "--out", out
        ]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "simulate", "--env", "abrupt", "--policy", "ts", "--T", "10", "--delta", "2", "--out",
            out
        ]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "simulate",
            "--env",
            "replay:/nonexistent/log.csv",
            "--policy",
            "ts",
            "--out",
            out
        ]),
        Some(3)
    );
    assert_eq!(
        code(&[
            "simulate",
            "--env",
            "abrupt",
            "--policy",
            "ts",
            "--T",
            "10",
            "--out",
            "/nonexistent/dir/x.csv"
        ]),
        Some(3)
    );
    assert_eq!(
        code(&["adwin", "--input", "/nonexistent/values.txt"]),
        Some(3)
    );
    assert_eq!(code(&["diagnose", "--env", "sideways"]), Some(2));

    let bad_log = dir.path().join("bad.csv");
    std::fs::write(&bad_log, "t,arm,reward\n1,0,1\n").unwrap();
    let env = format!("replay:{}", bad_log.display());
    assert_eq!(
        code(&["simulate", "--env", &env, "--policy", "ts", "--out", out]),
        Some(3)
    );
}

#[test]
fn adwin_reads_stdin_and_reports_detection() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nsbandit"))
        .args(["adwin", "--delta", "0.01", "--input", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let input: String = (0..25)
        .map(|t| if t < 10 { "0\n" } else { "1\n" })
        .collect();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,estimate,detected,window_size");
    assert_eq!(lines[18], "18,0.4444444444444444,0,18");
    assert_eq!(lines[19], "19,1,1,9");
    assert_eq!(lines.len(), 26);
}

#[test]
fn diagnose_prints_ratios() {
    let output = nsbandit(&["diagnose", "--env", "abrupt"]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("changepoints=10000,20000"));
    assert!(text.contains("abrupt_ratio: all_arms="));

    let output = nsbandit(&["diagnose", "--env", "stationary", "--K", "10", "--T", "300"]);
    assert!(String::from_utf8(output.stdout)
        .unwrap()
        .contains("undefined"));
}
