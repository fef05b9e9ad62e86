use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cvqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvqe"))
        .args(args)
        .output()
        .expect("cvqe runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const INFEASIBLE: &str = r#"{
  "n": 1,
  "objective": {"A": [[1.0]], "c": [0.0], "d": 0.0},
  "constraints": [{"A": [[0.0]], "c": [0.0], "d": 1.0}]
}"#;

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&cvqe(&["--help"])), 0);
    assert_eq!(code(&cvqe(&[])), 1);
    assert_eq!(code(&cvqe(&["gen"])), 1);
    assert_eq!(code(&cvqe(&["oracle", "x.json", "--mode", "simplex"])), 1);
    assert_eq!(code(&cvqe(&["bench", "table2"])), 1);
}

#[test]
fn gen_writes_named_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = cvqe(&[
        "gen", "-n", "3", "-m", "1", "--seed", "4", "--count", "3", "--out", out,
    ]);
    assert_eq!(code(&run), 0);
    let listed = String::from_utf8(run.stdout).unwrap();
    assert_eq!(listed.lines().count(), 3);
    for seed in 4..7 {
        let text =
            fs::read_to_string(dir.path().join(format!("instance-n3-m1-s{seed}.json"))).unwrap();
        let inst = qcqp_vqe::document::parse_instance(&text).unwrap();
        assert_eq!((inst.n(), inst.m()), (3, 1));
    }
}

#[test]
fn solve_writes_report_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        code(&cvqe(&[
            "gen",
            "-n",
            "2",
            "-m",
            "1",
            "--seed",
            "3",
            "--ensure-active",
            "--out",
            out
        ])),
        0
    );
    let inst = path(dir.path(), "instance-n2-m1-s3.json");

    assert_eq!(
        code(&cvqe(&["solve", &inst, "--seed", "1", "--out", out])),
        0
    );
    let report = fs::read_to_string(dir.path().join("instance-n2-m1-s3.report.json")).unwrap();
    let doc = qcqp_vqe::document::ReportDocument::from_json(&report).unwrap();
    assert_eq!(doc.pmf.unwrap().len(), 4);
    let trace = fs::read_to_string(dir.path().join("instance-n2-m1-s3.trace.csv")).unwrap();
    assert_eq!(
        trace.lines().next().unwrap(),
        "iter,lambda_1,F0,F1,inner_evals"
    );

    let truncated = cvqe(&["solve", &inst, "--max-outer", "1", "--out", out]);
    assert_eq!(code(&truncated), 2);
}

#[test]
fn oracle_modes_and_infeasibility() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad = path(dir.path(), "bad.json");
    fs::write(&bad, INFEASIBLE).unwrap();
    assert_eq!(
        code(&cvqe(&["oracle", &bad, "--mode", "lp", "--out", out])),
        3
    );
    assert_eq!(
        code(&cvqe(&["oracle", &bad, "--mode", "brute", "--out", out])),
        3
    );
    assert!(dir.path().join("bad.lp.json").exists());
    assert!(dir.path().join("bad.brute.json").exists());

    assert_eq!(
        code(&cvqe(&[
            "gen",
            "-n",
            "3",
            "-m",
            "2",
            "--seed",
            "7",
            "--ensure-active",
            "--out",
            out
        ])),
        0
    );
    let inst = path(dir.path(), "instance-n3-m2-s7.json");
    assert_eq!(
        code(&cvqe(&["oracle", &inst, "--mode", "lp", "--out", out])),
        0
    );
    let lp = fs::read_to_string(dir.path().join("instance-n3-m2-s7.lp.json")).unwrap();
    let doc = qcqp_vqe::document::ReportDocument::from_json(&lp).unwrap();
    assert!((doc.objective.unwrap() - -1.3223154941389603).abs() < 1e-9);
}

#[test]
fn unreadable_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let missing = path(dir.path(), "missing.json");
    assert_eq!(code(&cvqe(&["solve", &missing, "--out", out])), 1);
    let garbage = path(dir.path(), "garbage.json");
    fs::write(&garbage, "{ not json").unwrap();
    let run = cvqe(&["oracle", &garbage, "--mode", "lp", "--out", out]);
    assert_eq!(code(&run), 1);
    assert!(String::from_utf8(run.stderr)
        .unwrap()
        .contains("garbage.json"));
}

#[test]
fn bench_table1_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = cvqe(&[
        "bench",
        "table1",
        "--seed",
        "3",
        "--sequential",
        "--out",
        out,
    ]);
    assert_eq!(code(&run), 0);
    let md = fs::read_to_string(dir.path().join("table1.md")).unwrap();
    assert_eq!(String::from_utf8(run.stdout).unwrap(), md);
    let csv = fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    let again = tempfile::tempdir().unwrap();
    let run = cvqe(&[
        "bench",
        "table1",
        "--seed",
        "3",
        "--out",
        again.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0);
    assert_eq!(
        fs::read_to_string(again.path().join("table1.csv")).unwrap(),
        csv
    );
}
