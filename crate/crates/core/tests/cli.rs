use std::path::Path;
use std::process::{Command, Output};

use trussbo::config::{self, RunConfigFile};
use trussbo::report::TRACE_HEADER;

fn trussbo(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trussbo"))
        .args(args)
        .current_dir(dir)
        .env_remove("TRUSSBO_SEED")
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path, budget: usize, n_init: usize) -> String {
    let mut file = RunConfigFile::default();
    file.config.budget = budget;
    file.config.n_init = n_init;
    file.config.gp_restarts = 1;
    file.config.acquisition.n_candidates = 64;
    file.config.acquisition.n_refine_starts = 2;
    let path = dir.join("run.conf");
    std::fs::write(&path, config::render(&file)).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn analyze_reported_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = trussbo(&["analyze", "1200", "2497.3", "2498.2", "42", "45"], dir.path());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("d = 1804.5 mm"), "{stdout}");
    assert!(stdout.contains("max_abs_stress = "));
    assert!(stdout.contains("failure_mode = "));
    assert_eq!(stdout.lines().filter(|l| l.starts_with('B') || l.starts_with('T')).count(), 13);
    assert!(matches!(out.status.code(), Some(0 | 2)));
}

#[test]
fn analyze_out_of_bounds_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = trussbo(&["analyze", "400", "1000", "1000", "30", "30"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`a`"));
    let out = trussbo(&["analyze", "1000", "x", "1000", "30", "30"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`b`"));
    let out = trussbo(&["analyze", "1000", "1000"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_flat_design_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let out = trussbo(&["analyze", "2000", "2000", "2000", "0", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("failure_mode = degenerate_geometry"), "{stdout}");
}

#[test]
fn optimize_is_deterministic_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 14, 6);
    let a = trussbo(&["optimize", &cfg, "--out", "a.csv", "--seed", "7"], dir.path());
    let b = trussbo(&["optimize", &cfg, "--out", "b.csv", "--seed", "7"], dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    let csv_a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let csv_b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let text = String::from_utf8(csv_a).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TRACE_HEADER));
    let best: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(best.len(), 14);
    assert!(best.windows(2).all(|w| w[1] <= w[0]));
    assert!(String::from_utf8_lossy(&a.stdout).contains("best_mass = "));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 3, 2);
    let out = Command::new(env!("CARGO_BIN_EXE_trussbo"))
        .args(["baseline", &cfg, "--out", "t.csv"])
        .current_dir(dir.path())
        .env("TRUSSBO_SEED", "99")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed = 99"));
    let out = Command::new(env!("CARGO_BIN_EXE_trussbo"))
        .args(["baseline", &cfg, "--out", "t.csv"])
        .current_dir(dir.path())
        .env("TRUSSBO_SEED", "nope")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn optimize_rejects_inconsistent_budget() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "budget = 5\nn_init = 10\n").unwrap();
    let out = trussbo(&["optimize", path.to_str().unwrap(), "--out", "t.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn baseline_single_row_and_malformed_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.conf");
    std::fs::write(&path, "budget = 1\nn_init = 1\n").unwrap();
    let out = trussbo(&["baseline", path.to_str().unwrap(), "--out", "one.csv"], dir.path());
    assert!(matches!(out.status.code(), Some(0 | 2)));
    let csv = std::fs::read_to_string(dir.path().join("one.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("0,random,"));

    std::fs::write(&path, "budget = 10\nthis is not config\n").unwrap();
    let out = trussbo(&["baseline", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn shipped_defaults_match_builtin() {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.conf")).unwrap();
    let parsed = config::parse(&text).unwrap();
    assert_eq!(parsed, RunConfigFile::default());
}
