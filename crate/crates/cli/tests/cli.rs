use std::path::PathBuf;
use std::process::{Command, Output};

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wordnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn probe_rf_on_z9_separates() {
    let s = sample("z_rf.toml");
    let out = run(&["probe-rf", s.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("verdict: separated"));
    assert!(text.contains("image of w: (0 3 6)(1 4 7)(2 5 8)"));
}

#[test]
fn failing_cyclic_three_witness_exits_one() {
    let s = sample("mws_fail.toml");
    let out = run(&["check-witness", s.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("violation [norm] at (1 1): 1/1"));
}

#[test]
fn missing_file_exits_three() {
    let out = run(&["norm", "/definitely/not/here.toml"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn unknown_flag_exits_three() {
    let out = run(&["norm", "--no-such-flag", "x.toml"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn non_bijective_permutation_names_the_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "degree = 3\ngenerators = [\"[1, 1, 2]\"]\n").unwrap();
    let out = run(&["norm", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("image point 1 repeated"), "{}", stderr(&out));
}

#[test]
fn toml_errors_carry_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "degree = 3\ngenerators = [\"(0 1)\"\n").unwrap();
    let out = run(&["norm", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("bad.toml:2:"), "{}", stderr(&out));
}

#[test]
fn records_are_deterministic() {
    for (cmd, file) in [
        ("search", "z_rf.toml"),
        ("build-lef", "lef_z2.toml"),
        ("estimate-free-norm", "free_norms.toml"),
        ("norm", "s3.toml"),
    ] {
        let s = sample(file);
        let a = run(&["--format", "records", cmd, s.to_str().unwrap()]);
        let b = run(&["--format", "records", cmd, s.to_str().unwrap()]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert!(!a.stdout.is_empty());
        for line in stdout(&a).lines() {
            serde_json::from_str::<serde_json::Value>(line).expect("each record is JSON");
        }
    }
    let a = run(&["--format", "records", "--seed", "11", "selfcheck", "--trials", "20"]);
    let b = run(&["--format", "records", "--seed", "11", "selfcheck", "--trials", "20"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_replays_printed_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let mut lines = String::new();
    for (cmd, file) in [("probe-rf", "z_rf.toml"), ("probe-lef", "lef_z2.toml"), ("search", "z_rf.toml")] {
        let s = sample(file);
        let out = run(&["--format", "records", cmd, s.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        lines.push_str(&stdout(&out));
    }
    let good = dir.path().join("certs.jsonl");
    std::fs::write(&good, &lines).unwrap();
    let out = run(&["verify", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(stdout(&out).matches("replays").count(), 3);

    let tampered = dir.path().join("tampered.jsonl");
    std::fs::write(&tampered, lines.replacen("\"separated\"", "\"contained\"", 1)).unwrap();
    let out = run(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn integral_values_print_as_fractions() {
    let s = sample("s3.toml");
    let out = run(&["quotient-norm", s.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("()N\t0/1"));
    assert!(stdout(&out).contains("(0 1)N\t1/1"));
}

#[test]
fn exact_free_norms_exit_zero() {
    let s = sample("free_norms.toml");
    let out = run(&["estimate-free-norm", s.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    // a budget too small to find the commutator's decomposition leaves it open
    let out = run(&["--budget-factors", "1", "estimate-free-norm", s.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("upper: unknown"), "{}", stdout(&out));
}

#[test]
fn chain_values() {
    let s = sample("chain.toml");
    let out = run(&["chain", s.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("1 1 1\t1/4\tlevel 2"));
    assert!(text.contains("1\t1/2\tlevel 1"));
}

#[test]
fn exhausted_search_exits_two_with_caveat() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.toml");
    std::fs::write(
        &path,
        "rank = 1\nw = \"1 1 1 1 1\"\nm = 3\n[catalog]\ncyclic = [2, 8]\n",
    )
    .unwrap();
    let out = run(&["search", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stdout(&out));
    assert!(stdout(&out).contains("caveat:"));
}
