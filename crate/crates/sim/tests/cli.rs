use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "\
[scenario]
link = \"ue-ul\"
target_eps = 0.05
snr_db = 5.0
[system]
B = 8
U = 2
n = 48
np = 8
bits = 8
[montecarlo]
seed = 3
samples = 5000
[sweep]
np = [4, 24]
b_prime = [2]
tol_db = 1.0
";

fn fblmimo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fblmimo"))
        .current_dir(dir)
        .args(args)
        .env_remove("FBLMIMO_THREADS")
        .output()
        .unwrap()
}

fn setup(config: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), config).unwrap();
    dir
}

#[test]
fn rcus_point_writes_csv_and_manifest() {
    let dir = setup(SMALL);
    let out = fblmimo(dir.path(), &["rcus-point", "--config", "run.toml", "--out", "point.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("point.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "scenario,B,U,B_prime,n,np,snr_db,s_star,epsilon,ci95,n_samples,master_seed");
    assert_eq!(lines.len(), 2);
    let fields: Vec<_> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 12);
    assert_eq!(fields[0], "ue-init-ul");
    assert_eq!(fields[10], "5000");
    assert!(dir.path().join("point.toml").exists());
}

#[test]
fn manifest_reproduces_csv() {
    let dir = setup(SMALL);
    let out = fblmimo(dir.path(), &["ue-ul-sweep", "--config", "run.toml", "--out", "first.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = std::fs::read_to_string(dir.path().join("first.toml")).unwrap();
    assert!(manifest.contains("[manifest]") && manifest.contains("command = \"ue-ul-sweep\""));
    let out = fblmimo(dir.path(), &["ue-ul-sweep", "--config", "first.toml", "--out", "second.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read(dir.path().join("first.csv")).unwrap();
    let b = std::fs::read(dir.path().join("second.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = setup(SMALL);
    fblmimo(dir.path(), &["rcus-point", "--config", "run.toml", "--seed", "99", "--out", "p.csv"]);
    let csv = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",99"));
}

#[test]
fn config_errors_exit_2() {
    let dir = setup(&SMALL.replace("n = 48\n", ""));
    let out = fblmimo(dir.path(), &["min-snr", "--config", "run.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("system.n"));

    let dir = setup(&SMALL.replace("np = 8\n", "np = 300\n"));
    let out = fblmimo(dir.path(), &["min-snr", "--config", "run.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("np < n"));

    let dir = setup(&format!("{SMALL}bogus = 1\n"));
    let out = fblmimo(dir.path(), &["min-snr", "--config", "run.toml"]);
    assert_eq!(out.status.code(), Some(2));

    let out = fblmimo(dir.path(), &["min-snr", "--config", "missing.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreachable_target_exits_3() {
    // even the widened bracket edge stays far below the required SNR
    let cfg = format!("{SMALL}snr_lo_db = -40.0\nsnr_hi_db = -38.0\nwiden_db = 1.0\n");
    let dir = setup(&cfg);
    let out = fblmimo(dir.path(), &["min-snr", "--config", "run.toml", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unresolved_estimate_exits_4() {
    let cfg = SMALL.replace("target_eps = 0.05", "target_eps = 2e-3").replace("samples = 5000", "samples = 1000");
    let cfg = cfg.replace("B = 8", "B = 32");
    let dir = setup(&cfg);
    let out = fblmimo(dir.path(), &["min-snr", "--config", "run.toml", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("x.csv").exists());
}

#[test]
fn validate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = fblmimo(dir.path(), &["validate"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().count() >= 5 && !text.contains("FAIL"), "{text}");
}

#[test]
fn thread_override_from_environment() {
    let dir = setup(SMALL);
    let out = Command::new(env!("CARGO_BIN_EXE_fblmimo"))
        .current_dir(dir.path())
        .args(["rcus-point", "--config", "run.toml", "--out", "e.csv"])
        .env("FBLMIMO_THREADS", "two")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_fblmimo"))
        .current_dir(dir.path())
        .args(["rcus-point", "--config", "run.toml", "--out", "e.csv"])
        .env("FBLMIMO_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let manifest = std::fs::read_to_string(dir.path().join("e.toml")).unwrap();
    assert!(manifest.contains("threads = 2"));
}

#[test]
fn bad_usage_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fblmimo(dir.path(), &["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        fblmimo(dir.path(), &["min-snr", "--samples", "10", "--paper-fidelity"]).status.code(),
        Some(2)
    );
}
