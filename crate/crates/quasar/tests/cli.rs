//! End-to-end checks of the `quasar` binary: run, validate, and report
//! against real artifact directories, including the failure exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn quasar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasar"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("exp.toml");
    fs::write(
        &path,
        r#"
label = "cli-check"
seed = 11
methods = ["qra", "omp"]

[scene]
range_cells = 2
grid = 16
sparsity = 2

[aperture]
rates = [0.5]
pattern = "random"
gain_taper = "two_level"

[solver]
eta = 1.0
"#,
    )
    .unwrap();
    path
}

#[test]
fn run_report_roundtrip_and_tamper_detection() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path());
    let out_dir = tmp.path().join("runs");

    let run = quasar(&["run", "--config", config.to_str().unwrap(), "--output-dir",
        out_dir.to_str().unwrap()]);
    assert!(run.status.success(), "run failed: {}", stderr(&run));
    let text = stdout(&run);
    assert!(text.contains("registers S=1 A=2 B=1 C=3 I=4"), "unexpected output: {text}");
    assert!(text.contains("0 failures"), "unexpected output: {text}");

    let run_dir = out_dir.join("cli-check");
    let report = quasar(&["report", run_dir.to_str().unwrap()]);
    assert!(report.status.success(), "report failed: {}", stderr(&report));
    assert!(stdout(&report).contains("2 rows verified"), "{}", stdout(&report));

    // Corrupt one rmse field; report must notice and exit 1.
    let csv_path = run_dir.join("results.csv");
    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines: Vec<String> = csv.lines().map(str::to_owned).collect();
    let mut fields: Vec<String> = lines[1].split(',').map(str::to_owned).collect();
    fields[2] = "1.0e0".into();
    lines[1] = fields.join(",");
    fs::write(&csv_path, lines.join("\n") + "\n").unwrap();

    let tampered = quasar(&["report", run_dir.to_str().unwrap()]);
    assert_eq!(tampered.status.code(), Some(1), "{}", stdout(&tampered));
    assert!(stdout(&tampered).contains("MISMATCH"), "{}", stdout(&tampered));
}

#[test]
fn validate_flags_bad_rates_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.toml");
    let good = fs::read_to_string(write_config(tmp.path())).unwrap();
    fs::write(&path, good.replace("rates = [0.5]", "rates = [0.0]")).unwrap();

    let out = quasar(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("aperture.rates"), "{}", stdout(&out));
}

#[test]
fn presets_are_listed_on_a_bad_name() {
    let out = quasar(&["run", "--preset", "nonesuch"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("f16-like") && err.contains("yak42-like"), "{err}");
}

#[test]
fn report_on_a_missing_directory_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = quasar(&["report", tmp.path().join("nope").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("results.csv"), "{}", stderr(&out));
}

#[test]
fn seed_override_changes_the_scene() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path());
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");

    for (dir, seed) in [(&dir_a, "11"), (&dir_b, "12")] {
        let out = quasar(&["run", "--config", config.to_str().unwrap(), "--output-dir",
            dir.to_str().unwrap(), "--seed", seed]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let truth_a = fs::read(dir_a.join("cli-check/sigma_true.cq64")).unwrap();
    let truth_b = fs::read(dir_b.join("cli-check/sigma_true.cq64")).unwrap();
    assert_ne!(truth_a, truth_b, "different seeds must give different scenes");
}
