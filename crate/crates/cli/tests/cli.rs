use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bediv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bediv"))
        .args(args)
        .env_remove("BEDIV_SEED")
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fuzz(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["fuzz", "--mode", "bediv-structure", "--sut", "bst", "--runs", "2000", "--out", path(out)];
    args.extend_from_slice(extra);
    bediv(&args)
}

#[test]
fn fuzz_writes_statistics_and_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let result = fuzz(&out, &["--seed", "4", "--trace-log", "--stats-interval", "500"]);
    assert!(result.status.success(), "{}", stderr(&result));
    let text = stdout(&result);
    assert!(text.starts_with("seed,4\nmode,bediv-structure\n"), "{text}");
    assert!(text.contains("total_runs,2000\n"));

    let stats = fs::read_to_string(out.join("stats.csv")).unwrap();
    let mut lines = stats.lines();
    assert_eq!(
        lines.next(),
        Some("elapsed_ms,total_runs,valid_runs,diverse_valid_runs,num_branches,num_traces,b0,b1,b2,n_s,u_s,n_v,u_v")
    );
    assert_eq!(lines.count(), 4);
    assert!(fs::read_to_string(out.join("diversity.csv")).unwrap().starts_with("elapsed_ms,b0,b1,b2\n"));
    assert!(fs::read_dir(out.join("queue")).unwrap().count() >= 2);
    assert!(!fs::read_to_string(out.join("trace.log")).unwrap().is_empty());
}

#[test]
fn fuzz_without_sut_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let result = bediv(&["fuzz", "--mode", "zest", "--runs", "10", "--out", path(dir.path())]);
    assert_eq!(result.status.code(), Some(2));
    assert!(stderr(&result).contains("--sut"));
}

#[test]
fn fuzz_rejects_unknown_mode_and_bad_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let bad_mode = bediv(&["fuzz", "--mode", "afl", "--sut", "bst", "--runs", "10", "--out", path(dir.path())]);
    assert_eq!(bad_mode.status.code(), Some(2));
    let bad_epsilon = fuzz(&dir.path().join("e"), &["--epsilon", "1.5"]);
    assert_eq!(bad_epsilon.status.code(), Some(2));
    let zero_interval = fuzz(&dir.path().join("z"), &["--stats-interval", "0"]);
    assert_eq!(zero_interval.status.code(), Some(2));
}

#[test]
fn same_seed_gives_identical_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    assert!(fuzz(&a, &["--seed", "9"]).status.success());
    assert!(fuzz(&b, &["--seed", "9"]).status.success());
    assert!(fuzz(&c, &["--seed", "10"]).status.success());
    let read = |p: &Path| fs::read(p.join("stats.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let from_env = Command::new(env!("CARGO_BIN_EXE_bediv"))
        .args(["fuzz", "--mode", "zest", "--sut", "xml", "--runs", "300", "--out"])
        .arg(dir.path().join("env"))
        .env("BEDIV_SEED", "77")
        .output()
        .unwrap();
    assert!(from_env.status.success());
    assert!(stdout(&from_env).starts_with("seed,77\n"));
    let from_flag = bediv(&[
        "fuzz",
        "--mode",
        "zest",
        "--sut",
        "xml",
        "--runs",
        "300",
        "--seed",
        "77",
        "--out",
        path(&dir.path().join("flag")),
    ]);
    let summary = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with("out,")).collect::<Vec<_>>().join("\n");
    assert_eq!(summary(&from_env), summary(&from_flag));
    assert_eq!(
        fs::read(dir.path().join("env/stats.csv")).unwrap(),
        fs::read(dir.path().join("flag/stats.csv")).unwrap()
    );
}

#[test]
fn unwritable_output_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let result = fuzz(&blocker.join("out"), &[]);
    assert_eq!(result.status.code(), Some(2));
    assert!(!stderr(&result).is_empty());
}

#[test]
fn replay_reproduces_recorded_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("expr");
    let result = bediv(&[
        "fuzz", "--mode", "bediv-structure", "--sut", "expr", "--runs", "30000", "--seed", "3", "--out", path(&out),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let failures = out.join("failures");
    let files = fs::read_dir(&failures)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "bdvf"))
        .count();
    assert!(files > 0, "no failure found");

    let replay = bediv(&["replay", "--in", path(&failures), "--sut", "expr"]);
    assert!(replay.status.success(), "{}", stderr(&replay));
    let text = stdout(&replay);
    assert_eq!(text.lines().count(), files);
    for line in text.lines() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1..3], ["failure", "failure"], "{line}");
        assert!(!fields[3].is_empty());
    }

    let whole = bediv(&["replay", "--in", path(&out), "--sut", "expr"]);
    assert!(whole.status.success());
    assert!(stdout(&whole).lines().count() > files);
}

#[test]
fn replay_of_empty_directory_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let result = bediv(&["replay", "--in", path(dir.path()), "--sut", "bst"]);
    assert!(result.status.success());
    assert_eq!(stdout(&result), "");
}

#[test]
fn replay_of_truncated_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.bdvf");
    fs::write(&file, b"BDVF\x01\x00\x10\x00").unwrap();
    let result = bediv(&["replay", "--in", path(&file), "--sut", "bst"]);
    assert_eq!(result.status.code(), Some(2));
    assert!(stderr(&result).contains("bad.bdvf"));
}

#[test]
fn replay_reports_a_mismatched_recording() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert!(fuzz(&out, &["--seed", "2"]).status.success());
    let queue = out.join("queue");
    let valid = fs::read_dir(&queue)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_str().unwrap().ends_with("_valid.bdvf"))
        .unwrap();
    let renamed = dir.path().join("id_000000_invalid.bdvf");
    fs::copy(&valid, &renamed).unwrap();
    let result = bediv(&["replay", "--in", path(&renamed), "--sut", "bst"]);
    assert_eq!(result.status.code(), Some(1));
    assert!(stdout(&result).contains(",invalid,valid,"));

    let unlabeled = dir.path().join("plain.bdvf");
    fs::copy(&valid, &unlabeled).unwrap();
    let result = bediv(&["replay", "--in", path(&unlabeled), "--sut", "bst"]);
    assert!(result.status.success());
    assert!(stdout(&result).contains(",-,valid,"));
}

#[test]
fn diversity_of_trace_logs() {
    let out = bediv(&["diversity", "--log", &fixture("four_singletons.log")]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "4,4,4\n");

    let valid_only = bediv(&["diversity", "--log", &fixture("four_singletons.log"), "--valid-only"]);
    assert_eq!(stdout(&valid_only), "3,3,3\n");

    let skewed = bediv(&["diversity", "--log", &fixture("skewed.log"), "--q", "0,1,2"]);
    assert_eq!(stdout(&skewed), "2,1.754765,1.6\n");
    let order_two = bediv(&["diversity", "--log", &fixture("skewed.log"), "--q", "2"]);
    assert_eq!(stdout(&order_two), "1.6\n");
}

#[test]
fn diversity_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = bediv(&["diversity", "--log", path(&dir.path().join("nope.log"))]);
    assert_eq!(missing.status.code(), Some(2));

    let bad = dir.path().join("bad.log");
    fs::write(&bad, "0\tvalid\t00000000000000a1\t1\nnot a line\n").unwrap();
    let malformed = bediv(&["diversity", "--log", path(&bad)]);
    assert_eq!(malformed.status.code(), Some(2));
    assert!(stderr(&malformed).contains("line 2"), "{}", stderr(&malformed));

    let negative = bediv(&["diversity", "--log", &fixture("skewed.log"), "--q", "-1"]);
    assert_eq!(negative.status.code(), Some(2));
}

#[test]
fn compare_identical_files_gives_zero_deltas() {
    let a = fixture("stats_a.csv");
    let out = bediv(&["compare", "--a", &a, "--b", &a]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "metric,a,b,delta\nb0,10,10,0\nb1,5.5,5.5,0\nb2,3.25,3.25,0\ndiverse_valid_runs,100,100,0\n"
    );
}

#[test]
fn compare_reports_final_row_deltas() {
    let out = bediv(&["compare", "--a", &fixture("stats_a.csv"), "--b", &fixture("stats_b.csv")]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "metric,a,b,delta\nb0,10,12,2\nb1,5.5,5.25,-0.25\nb2,3.25,4,0.75\ndiverse_valid_runs,100,90,-10\n"
    );
}

#[test]
fn compare_rejects_foreign_files() {
    let dir = tempfile::tempdir().unwrap();
    let wrong = dir.path().join("wrong.csv");
    fs::write(&wrong, "a,b,c\n1,2,3\n").unwrap();
    let out = bediv(&["compare", "--a", &fixture("stats_a.csv"), "--b", path(&wrong)]);
    assert_eq!(out.status.code(), Some(2));

    let empty = dir.path().join("empty.csv");
    fs::write(
        &empty,
        "elapsed_ms,total_runs,valid_runs,diverse_valid_runs,num_branches,num_traces,b0,b1,b2,n_s,u_s,n_v,u_v\n",
    )
    .unwrap();
    let out = bediv(&["compare", "--a", path(&empty), "--b", &fixture("stats_a.csv")]);
    assert_eq!(out.status.code(), Some(2));
}
