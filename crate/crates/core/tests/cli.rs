use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torsionlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn coker_of_one_by_one_two() {
    let o = run_stdin(&["coker"], "1 1 M\n1 1 2\n0 0 0\n");
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["torsion"], serde_json::json!(["2"]));
    assert_eq!(v["rank"], 1);
    assert_eq!(v["free_rank"], 0);
    assert_eq!(v["invariant_factors"], serde_json::json!(["2"]));
}

#[test]
fn snf_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.sms");
    std::fs::write(&path, "2 2 M\n1 1 2\n2 2 3\n0 0 0\n").unwrap();
    let o = run(&["snf", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        r#"{"rank":2,"invariant_factors":["1","6"],"free_rank":0,"torsion":["6"]}"#
    );
}

#[test]
fn core_of_a_single_edge_is_empty() {
    let o = run_stdin(&["core"], "5 3 1\n1 2 3\n");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 3 0\n");
}

#[test]
fn sample_incidence_coker_pipeline() {
    let s = run(&[
        "sample", "--n", "12", "--k", "3", "--m", "10", "--seed", "4",
    ]);
    assert_eq!(s.status.code(), Some(0));
    let h = stdout(&s);
    assert_eq!(
        h,
        stdout(&run(&[
            "sample", "--n", "12", "--k", "3", "--m", "10", "--seed", "4"
        ]))
    );
    let inc = run_stdin(&["incidence"], &h);
    assert!(stdout(&inc).starts_with("12 10 M\n"));
    let a = stdout(&run_stdin(&["coker"], &stdout(&inc)));
    let b = stdout(&run_stdin(&["coker"], &h));
    assert_eq!(a, b);
}

#[test]
fn process_writes_json_lines() {
    let o = run(&[
        "process",
        "--n",
        "20",
        "--k",
        "3",
        "--m",
        "30",
        "--record-every",
        "5",
        "--trials",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["step"], 0);
    assert_eq!(lines[0]["free_rank"], 20);
    assert!(lines.iter().any(|l| l["trial"] == 1));
}

#[test]
fn sweep_csv_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "n = 20,30\nk = 3\nc = 2, 8\ntrials = 7\nseed = 3\n").unwrap();
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("n,k,param_kind"));
    assert!(rows[1..].iter().all(|r| r.split(',').nth(5) == Some("5")));
    let again = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "5",
        "--parallelism",
        "3",
    ]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn curve_writes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = run(&[
        "curve",
        "--n",
        "20",
        "--k",
        "3",
        "--grid",
        "0:40:20",
        "--trials",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn verify_passes_and_a_broken_kernel_fails() {
    let o = run(&["verify", "--suite", "claim6", "--n", "8", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    let o = run(&[
        "verify",
        "--suite",
        "claim6",
        "--n",
        "8",
        "--k",
        "3",
        "--inject-fault",
        "snf",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(
        run(&["sample", "--n", "5", "--k", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["sample", "--n", "5", "--k", "3", "--m", "2", "--c", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        run_stdin(&["coker"], "2 2 M\n3 1 1\n0 0 0\n").status.code(),
        Some(1)
    );
    assert_eq!(
        run_stdin(
            &["coker", "--max-entries", "1"],
            "2 2 M\n1 1 1\n2 2 1\n0 0 0\n"
        )
        .status
        .code(),
        Some(2)
    );
    let budget = bin()
        .args(["verify", "--suite", "lemma8", "--n", "12"])
        .env("TORSIONLAB_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(budget.status.code(), Some(2));
}
