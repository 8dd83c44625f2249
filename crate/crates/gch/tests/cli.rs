//! Contract tests for the `gch` binary and the command layer: exit codes,
//! file schemas, manifest completeness, and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gch_cli_{tag}_{}", std::process::id()));
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn gch(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gch"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

const ZERO_CONFIG: &str = r#"
[grid]
n_points = 64
length = 40.0

[params]
k1 = -1.0
k2 = -1.0

[time]
t_end = 0.5
dt_init = 0.05
record_every = 2

[ic]
kind = "zero"
"#;

#[test]
fn simulate_zero_run_contract() {
    let dir = workdir("zero");
    std::fs::write(dir.join("run.toml"), ZERO_CONFIG).unwrap();
    let out = gch(&["simulate", "--config", "run.toml", "--out", "result", "--quiet"], &dir);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let diag = std::fs::read_to_string(dir.join("result/diagnostics.csv")).unwrap();
    let mut lines = diag.lines();
    assert_eq!(lines.next().unwrap(), "t,h1,h2,min_ux,min_mux,max_abs_u,peak_x");
    for line in lines {
        let h1: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(h1, 0.0);
    }

    // every manifest output exists and is non-empty
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("result/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["status"], "Completed");
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for o in outputs {
        let path = dir.join(o.as_str().unwrap());
        let meta = std::fs::metadata(&path).unwrap_or_else(|_| panic!("{path:?} missing"));
        assert!(meta.len() > 0);
    }

    let snap = std::fs::read_to_string(dir.join("result/snapshot_0000.csv")).unwrap();
    assert!(snap.starts_with("x,u,m\n"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_is_deterministic() {
    let dir = workdir("det");
    let config = ZERO_CONFIG.replace(
        "kind = \"zero\"",
        "kind = \"gaussian\"\namplitude = 0.3\nsigma = 1.5",
    );
    std::fs::write(dir.join("run.toml"), config).unwrap();
    for tag in ["a", "b"] {
        let out = gch(&["simulate", "--config", "run.toml", "--out", tag, "--quiet"], &dir);
        assert_eq!(out.status.code(), Some(0));
    }
    for file in ["diagnostics.csv", "snapshot_0000.csv", "snapshot_0002.csv"] {
        let a = std::fs::read(dir.join("a").join(file)).unwrap();
        let b = std::fs::read(dir.join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_errors_name_the_key_and_exit_1() {
    let dir = workdir("badcfg");
    std::fs::write(dir.join("bad.toml"), ZERO_CONFIG.replace("t_end = 0.5", "t_fin = 0.5"))
        .unwrap();
    let out = gch(&["simulate", "--config", "bad.toml"], &dir);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("t_fin") || stderr.contains("t_end"), "stderr: {stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_runs_fan_out() {
    let dir = workdir("sweep");
    let config = format!(
        "{ZERO_CONFIG}\n[[sweep]]\nk1 = -1.0\nk2 = -1.0\n\n[[sweep]]\nk1 = 0.0\nk2 = -2.0\n"
    );
    std::fs::write(dir.join("run.toml"), config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gch"))
        .args(["simulate", "--config", "run.toml", "--out", "result", "--quiet"])
        .env("GCH_THREADS", "2")
        .current_dir(&dir)
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("result/sweep_000/diagnostics.csv").exists());
    assert!(dir.join("result/sweep_001/manifest.json").exists());
    let manifest = std::fs::read_to_string(dir.join("result/manifest.json")).unwrap();
    assert!(manifest.contains("sweep_000") && manifest.contains("sweep_001"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn peakon_verify_passes_for_ch_and_reports_complex_regime() {
    let dir = workdir("pv");
    let out = gch(&["peakon-verify", "--k1", "0", "--k2", "-2", "--c", "1", "--out", "scan"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS"), "stdout: {stdout}");
    let scan = std::fs::read_to_string(dir.join("scan/peakon_scan.csv")).unwrap();
    assert!(scan.starts_with("k1,k2,c,discriminant,c1_re,c1_im,is_real\n"));
    assert!(scan.lines().nth(1).unwrap().starts_with("0,-2,1,"));

    let out = gch(&["peakon-verify", "--k1", "-2", "--k2", "0", "--c", "1"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.matches("PASS").count(), 2, "both roots certified: {stdout}");

    let out = gch(&["peakon-verify", "--k1", "1", "--k2", "0", "--c", "1"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("complex peakon regime"), "stdout: {stdout}");
    assert!(stdout.contains("-16"), "discriminant shown: {stdout}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn besov_command_reports_norm_ratio_and_blocks() {
    let dir = workdir("besov");
    // store cos(x) on the unit circle grid
    let grid = gch::grid::Grid::new(256, std::f64::consts::TAU).unwrap();
    let field = gch::grid::Field::from_fn(&grid, f64::cos);
    gch::runner::write_snapshot_csv(&dir.join("cos.csv"), &field).unwrap();
    let scaled = field.scale(3.0);
    gch::runner::write_snapshot_csv(&dir.join("cos3.csv"), &scaled).unwrap();

    let parse_norm = |out: &Output| -> f64 {
        let stdout = String::from_utf8_lossy(&out.stdout);
        let line = stdout.lines().find(|l| l.contains("besov norm")).expect("norm line");
        line.rsplit(' ').next().unwrap().trim().parse().unwrap()
    };

    let out1 = gch(&["besov", "--input", "cos.csv", "--s", "1", "--out", "blocks"], &dir);
    assert_eq!(out1.status.code(), Some(0));
    let n1 = parse_norm(&out1);
    assert!(n1 > 0.0);
    let stdout = String::from_utf8_lossy(&out1.stdout);
    let ratio_line = stdout.lines().find(|l| l.contains("ratio B/H")).expect("ratio line");
    let ratio: f64 = ratio_line.rsplit(' ').next().unwrap().trim().parse().unwrap();
    assert!((0.25..=4.0).contains(&ratio), "ratio {ratio}");
    let blocks = std::fs::read_to_string(dir.join("blocks/blocks.csv")).unwrap();
    assert!(blocks.starts_with("q,norm_lp\n"));

    let out3 = gch(&["besov", "--input", "cos3.csv", "--s", "1"], &dir);
    let n3 = parse_norm(&out3);
    assert!((n3 - 3.0 * n1).abs() < 1e-9 * n3, "homogeneity: {n1} vs {n3}");

    // zero field has zero norm
    let zero = gch::grid::Field::zeros(&grid);
    gch::runner::write_snapshot_csv(&dir.join("zero.csv"), &zero).unwrap();
    let out0 = gch(&["besov", "--input", "zero.csv", "--s", "1"], &dir);
    assert_eq!(parse_norm(&out0), 0.0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn friedrichs_command_reports_contraction() {
    let dir = workdir("fried");
    let config = r#"
[grid]
n_points = 256
length = 40.0

[params]
k1 = -2.0
k2 = -2.0

[time]
t_end = 0.2

[ic]
kind = "gaussian"
amplitude = 0.02
sigma = 2.0
"#;
    std::fs::write(dir.join("run.toml"), config).unwrap();
    let out = gch(&["friedrichs", "--config", "run.toml", "--iters", "6"], &dir);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS"), "stdout: {stdout}");
    // table has one row per iterate
    assert_eq!(stdout.lines().filter(|l| l.contains("e-") && l.contains('|')).count(), 6);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn blowup_scan_reports_crossing_times() {
    let dir = workdir("scan");
    let config = r#"
[grid]
n_points = 512
length = 40.0

[params]
k1 = -2.0
k2 = 0.0

[time]
t_end = 0.4
dt_min = 1e-6

[ic]
kind = "gaussian"
amplitude = 1.0
sigma = 1.2

[scan]
amplitudes = [0.2, 6.0]
threshold = 50.0
"#;
    std::fs::write(dir.join("run.toml"), config).unwrap();
    let out = gch(&["blowup-scan", "--config", "run.toml", "--out", "result", "--quiet"], &dir);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("result/blowup_scan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "amplitude,t_cross");
    assert_eq!(lines.len(), 3);
    // the gentle amplitude never crosses, the steep one does
    assert!(lines[1].starts_with("0.2,"));
    assert_eq!(lines[1], "0.2,");
    assert!(lines[2].starts_with("6,"));
    assert!(lines[2].len() > "6,".len(), "steep amplitude crosses: {}", lines[2]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_ch_peakon_small_scale_travels() {
    let dir = workdir("peakon");
    let config = r#"
[grid]
n_points = 1024
length = 40.0

[params]
k1 = 0.0
k2 = -2.0

[time]
t_end = 1.0
record_every = 10

[ic]
kind = "peakon"
c = 1.0

[output]
snapshots = 3
"#;
    std::fs::write(dir.join("run.toml"), config).unwrap();
    let out = gch(&["simulate", "--config", "run.toml", "--out", "result", "--quiet"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let diag = std::fs::read_to_string(dir.join("result/diagnostics.csv")).unwrap();
    let rows: Vec<&str> = diag.lines().skip(1).collect();
    let first: Vec<f64> = rows[0].split(',').map(|v| v.parse().unwrap()).collect();
    let last: Vec<f64> = rows[rows.len() - 1].split(',').map(|v| v.parse().unwrap()).collect();
    let (t0, t1) = (first[0], last[0]);
    let (x0, x1) = (first[6], last[6]);
    let speed = (x1 - x0) / (t1 - t0);
    assert!((speed - 1.0).abs() < 0.02, "peak speed {speed}");
    std::fs::remove_dir_all(&dir).ok();
}
