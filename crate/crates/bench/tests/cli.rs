use std::path::Path;
use std::process::{Command, Output};

fn ckde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ckde")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generate_corrupt_restore_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean.csv");
    let noisy = dir.path().join("noisy.csv");
    let restored = dir.path().join("restored.csv");
    let trace = dir.path().join("trace.txt");

    assert!(ckde(&["generate", "--signal", "multi_peak", "--length", "120", "--output", path(&clean)])
        .status
        .success());
    assert!(ckde(&["corrupt", "--input", path(&clean), "--output", path(&noisy), "--seed", "4"])
        .status
        .success());
    let noisy_text = std::fs::read_to_string(&noisy).unwrap();
    assert!(noisy_text.starts_with("t,y,mask\n"));

    let o = ckde(&[
        "restore", "--input", path(&noisy), "--output", path(&restored), "--trace", path(&trace),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = |p: &Path| std::fs::read_to_string(p).unwrap().lines().count();
    assert_eq!(rows(&restored), rows(&noisy));

    let trace = std::fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines[0], "k,h_t,h_y,sharpness,smoothness,score,selected");
    assert!(lines.last().unwrap().starts_with("# selected="));
    assert_eq!(lines[1..lines.len() - 1].iter().filter(|l| l.ends_with(",1")).count(), 1);

    let o = ckde(&["metrics", "--truth", path(&clean), "--estimate", path(&restored)]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.starts_with("feature_snr_db=")));
}

#[test]
fn metrics_of_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    assert!(ckde(&["generate", "--signal", "sine", "--length", "64", "--output", path(&a)]).status.success());
    let o = ckde(&["metrics", "--truth", path(&a), "--estimate", path(&a)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "rmse=0"));
}

#[test]
fn baseline_restore_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ckde(&["generate", "--signal", "sine", "--length", "64", "--output", path(&a)]);
    let o = ckde(&[
        "restore", "--input", path(&a), "--output", path(&b), "--method", "savitzky_golay", "--set", "window=7",
        "--set", "polyorder=2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = ckde(&["restore", "--input", path(&a), "--method", "median_filter", "--trace", "-"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(ckde(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ckde(&["restore", "--bogus"]).status.code(), Some(1));
    assert_eq!(ckde(&[]).status.code(), Some(1));
    let o = ckde(&["generate", "--signal", "square"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    ckde(&["generate", "--signal", "sine", "--length", "64", "--output", path(&a)]);
    assert_eq!(ckde(&["restore", "--input", path(&a), "--set", "k_max=0"]).status.code(), Some(1));
    assert_eq!(ckde(&["restore", "--input", path(&a), "--method", "fourier"]).status.code(), Some(1));
    assert_eq!(ckde(&["scaling", "--lengths", "200,100"]).status.code(), Some(1));
    assert_eq!(ckde(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(ckde(&["restore", "--input", path(&missing)]).status.code(), Some(2));
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "time,value\n0,1\n").unwrap();
    assert_eq!(ckde(&["restore", "--input", path(&bad)]).status.code(), Some(2));
    let unsorted = dir.path().join("unsorted.csv");
    std::fs::write(&unsorted, "t,y\n0,1\n2,1\n1,1\n3,0\n4,0\n").unwrap();
    assert_eq!(ckde(&["restore", "--input", path(&unsorted)]).status.code(), Some(2));
}

#[test]
fn bench_demo_plan_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.csv");
    let agg = dir.path().join("agg.csv");
    let plan = Path::new(env!("CARGO_MANIFEST_DIR")).join("plans/demo.cfg");
    let o = ckde(&["bench", "--plan", path(&plan), "--out", path(&out), "--aggregate", path(&agg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(&out).unwrap().lines().count() - 1;
    assert_eq!(rows, 2 * 2 * 4 * 3);
    let agg_rows = std::fs::read_to_string(&agg).unwrap().lines().count() - 1;
    assert_eq!(agg_rows, 2 * 2 * 4);
}

#[test]
fn scaling_single_length() {
    let o = ckde(&["scaling", "--lengths", "100", "--repetitions", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("100,"));
}
