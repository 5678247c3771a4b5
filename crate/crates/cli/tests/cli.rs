use std::path::Path;
use std::process::{Command, Output};

fn megden(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_megden"))
        .args(args)
        .env_remove("MEGDEN_THREADS")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_dataset(dir: &Path) -> std::path::PathBuf {
    let data = dir.join("data");
    let out = megden(&[
        "gen", "--out", s(&data), "--sensors", "8", "--pre", "4", "--post", "32", "--trials", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    data
}

#[test]
fn snir_against_zero_estimate_is_zero_db() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let avg = dir.path().join("avg.csv");
    let zero = dir.path().join("zero.csv");
    let ratios = dir.path().join("ratios.csv");
    assert!(megden(&["average", "--data", s(&data), "--out", s(&avg)]).status.success());
    let rows = vec![vec!["0"; 32].join(","); 8].join("\n");
    std::fs::write(&zero, rows).unwrap();

    let out = megden(&["snir", "--mean", s(&avg), "--calc", s(&zero), "--ratios", s(&ratios)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.00 dB");
    assert_eq!(std::fs::read_to_string(&ratios).unwrap().lines().count(), 8);
}

#[test]
fn snir_of_identical_matrices_is_infinite() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let avg = dir.path().join("avg.csv");
    assert!(megden(&["average", "--data", s(&data), "--out", s(&avg)]).status.success());
    let out = megden(&["snir", "--mean", s(&avg), "--calc", s(&avg)]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "inf dB");
}

#[test]
fn full_window_average_keeps_pre_stimulus() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let avg = dir.path().join("avg.csv");
    let out = megden(&["average", "--data", s(&data), "--out", s(&avg), "--window", "full"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&avg).unwrap();
    assert_eq!(text.lines().next().unwrap().split(',').count(), 36);
}

#[test]
fn single_trial_and_threshold_modes() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    for extra in [
        vec!["--mode", "single", "--trial", "2"],
        vec!["--threshold"],
        vec!["--mode", "single", "--threshold", "--wavelet", "db4"],
    ] {
        let out_path = dir.path().join("den.csv");
        let mut args = vec!["denoise", "--data", s(&data), "--out", s(&out_path), "--scales", "3"];
        args.extend(&extra);
        let out = megden(&args);
        assert!(out.status.success(), "{extra:?}: {}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(&out_path).unwrap();
        assert_eq!(text.lines().count(), 8);
    }
}

#[test]
fn failures_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let out_path = dir.path().join("x.csv");
    let cases: Vec<Vec<&str>> = vec![
        vec!["snir", "--mean", "missing.csv", "--calc", "missing.csv"],
        vec!["denoise", "--data", s(&data), "--out", s(&out_path), "--wavelet", "sym8"],
        vec!["denoise", "--data", s(&data), "--out", s(&out_path), "--scales", "40"],
        vec!["denoise", "--data", s(&data), "--out", s(&out_path), "--mode", "single", "--trial", "9"],
        vec!["filters", "--wavelet", "ahaar", "--n", "65"],
        vec!["filters", "--wavelet", "coif1", "--n", "1"],
    ];
    for args in cases {
        let out = megden(&args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty(), "{args:?} printed nothing");
    }
}

#[test]
fn truncated_trial_file_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = small_dataset(dir.path());
    let trial = data.join("trial_1.csv");
    let text = std::fs::read_to_string(&trial).unwrap();
    let kept: Vec<&str> = text.lines().take(7).collect();
    std::fs::write(&trial, kept.join("\n")).unwrap();
    let out = megden(&["denoise", "--data", s(&data), "--out", s(&dir.path().join("d.csv"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("trial_1.csv"));
}

#[test]
fn bad_thread_setting_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_megden"))
        .args(["filters", "--wavelet", "db4"])
        .env("MEGDEN_THREADS", "many")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("MEGDEN_THREADS"));
}

#[test]
fn filters_dump_shows_both_conventions() {
    let out = megden(&["filters", "--wavelet", "ahaar", "--n", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("ahaar(n=1) (4 taps)"));
    assert!(text.contains("orthonormal"));
    assert!(text.contains("literature convention"));
    // literature adjusted Haar is [1/2, 0, 0, 1/2]
    let lit = text.split("literature convention").nth(1).unwrap();
    let h_line = lit.lines().find(|l| l.trim_start().starts_with("h = [")).unwrap();
    let h: Vec<f64> = h_line
        .trim()
        .trim_start_matches("h = [")
        .trim_end_matches(']')
        .split(", ")
        .map(|v| v.parse().unwrap())
        .collect();
    for (got, want) in h.iter().zip([0.5, 0.0, 0.0, 0.5]) {
        assert!((got - want).abs() <= 1e-15);
    }
}
