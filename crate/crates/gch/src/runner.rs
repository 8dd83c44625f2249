//! Command layer: run configured simulations, verify peakons, compute Besov
//! reports, drive the Friedrichs iteration, and scan initial amplitudes for
//! blow-up. Everything here is deterministic: identical configs produce
//! byte-identical CSV and JSON outputs.
//!
//! File contracts:
//! - diagnostics CSV header `t,h1,h2,min_ux,min_mux,max_abs_u,peak_x`;
//! - snapshot CSV header `x,u,m`;
//! - peakon scan CSV header `k1,k2,c,discriminant,c1_re,c1_im,is_real`;
//! - block CSV header `q,norm_lp`;
//! - a JSON manifest naming every produced file.
//!
//! Exit codes (mapped by the binary): 0 completed, 2 blow-up suspected,
//! 1 failure/config error. `GCH_THREADS` caps sweep parallelism.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;

use crate::config::RunConfig;
use crate::equation::GchParams;
use crate::evolve::{self, RunStatus};
use crate::grid::{helmholtz_apply, Field, Grid};
use crate::invariants::DiagnosticsRecord;
use crate::littlewood_paley::{self, BesovIndex, DyadicPartition};
use crate::peakon;
use crate::{Error, Result};

/// Exit code for a clean run.
pub const EXIT_OK: i32 = 0;
/// Exit code for failures (config, IO, diverged iterates).
pub const EXIT_FAILED: i32 = 1;
/// Exit code when a run stops on the blow-up signals.
pub const EXIT_BLOWUP: i32 = 2;

/// What a `simulate` invocation produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_echo: RunConfig,
    pub grid: (usize, f64),
    pub params: GchParams,
    pub initial_condition: String,
    pub outputs: Vec<String>,
    pub status: String,
}

fn status_label(status: &RunStatus) -> String {
    match status {
        RunStatus::Completed => "Completed".to_string(),
        RunStatus::BlowUpSuspected { .. } => "BlowUpSuspected".to_string(),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Write a trajectory's diagnostics as CSV (UTF-8, `\n` endings).
pub fn write_diagnostics_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut text = String::from(DiagnosticsRecord::CSV_HEADER);
    text.push('\n');
    for r in records {
        text.push_str(&r.csv_row());
        text.push('\n');
    }
    write_text(path, &text)
}

/// Write one `x,u,m` snapshot.
pub fn write_snapshot_csv(path: &Path, u: &Field) -> Result<()> {
    let m = helmholtz_apply(u);
    let mut text = String::from("x,u,m\n");
    for ((x, uv), mv) in u.grid().nodes().iter().zip(u.values()).zip(m.values()) {
        text.push_str(&format!("{x},{uv},{mv}\n"));
    }
    write_text(path, &text)
}

/// Read a field stored as `x,u` (or `x,u,m`; extra columns ignored). The
/// grid is reconstructed from the uniform `x` column.
pub fn read_field_csv(path: &Path) -> Result<Field> {
    let text = std::fs::read_to_string(path)?;
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if !line.starts_with("x,u") {
                return Err(Error::Config(format!(
                    "{}: expected header starting with \"x,u\", got \"{line}\"",
                    path.display()
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let x: f64 = cols
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Config(format!("{}: bad x on line {}", path.display(), i + 1)))?;
        let u: f64 = cols
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Config(format!("{}: bad u on line {}", path.display(), i + 1)))?;
        xs.push(x);
        us.push(u);
    }
    let n = xs.len();
    if n < 8 {
        return Err(Error::Config(format!("{}: too few samples ({n})", path.display())));
    }
    let dx = xs[1] - xs[0];
    for w in xs.windows(2) {
        if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.abs().max(1.0) {
            return Err(Error::Config(format!("{}: x column is not uniform", path.display())));
        }
    }
    let grid = Grid::new(n, dx * n as f64)?;
    Field::new(&grid, us)
}

/// Worker cap for sweeps: `GCH_THREADS` or the machine's parallelism.
fn worker_count(jobs: usize) -> usize {
    let cap = std::env::var("GCH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    cap.min(jobs).max(1)
}

/// Run `f` over the items on a small worker pool, preserving order.
fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send + Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    let jobs = items.len();
    let workers = worker_count(jobs);
    if workers <= 1 || jobs <= 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let next = AtomicUsize::new(0);
    let mut results: Vec<Option<R>> = (0..jobs).map(|_| None).collect();
    let slots: Vec<std::sync::Mutex<&mut Option<R>>> =
        results.iter_mut().map(std::sync::Mutex::new).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= jobs {
                    break;
                }
                let r = f(i, &items[i]);
                **slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    results.into_iter().map(|r| r.expect("worker filled every slot")).collect()
}

/// A single configured run: integrate, persist diagnostics, snapshots and
/// manifest into `out_dir`.
fn run_one(config: &RunConfig, config_dir: &Path, out_dir: &Path, quiet: bool) -> Result<(RunManifest, RunStatus)> {
    std::fs::create_dir_all(out_dir)?;
    let grid = config.build_grid()?;
    let u0 = config.build_initial_condition(&grid, config_dir)?;
    let sim = config.sim_config()?;
    let traj = evolve::run(&u0, &sim)?;

    let mut outputs = Vec::new();
    let diag_path = out_dir.join("diagnostics.csv");
    write_diagnostics_csv(&diag_path, &traj.diagnostics)?;
    outputs.push(diag_path.display().to_string());

    let want = config.output.snapshots.unwrap_or(5).max(2).min(traj.states.len());
    let last = traj.states.len() - 1;
    let mut indices: Vec<usize> =
        (0..want).map(|i| i * last / (want - 1).max(1)).collect();
    indices.dedup();
    for (file_no, idx) in indices.iter().enumerate() {
        let path = out_dir.join(format!("snapshot_{file_no:04}.csv"));
        write_snapshot_csv(&path, &traj.states[*idx])?;
        outputs.push(path.display().to_string());
    }

    let manifest = RunManifest {
        config_echo: config.clone(),
        grid: (grid.n_points(), grid.length()),
        params: config.gch_params(),
        initial_condition: config.ic_description(),
        outputs: outputs.clone(),
        status: status_label(&traj.status),
    };
    let manifest_path = out_dir.join("manifest.json");
    write_text(&manifest_path, &serde_json::to_string_pretty(&manifest)?)?;

    if !quiet {
        println!(
            "{}: t = {:.6}, {} records, status {}",
            out_dir.display(),
            traj.final_time(),
            traj.times.len(),
            manifest.status
        );
    }
    Ok((manifest, traj.status))
}

fn json_err(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("json: {e}"))
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Error {
        json_err(e)
    }
}

/// `simulate`: one run, or a sweep when `[[sweep]]` entries are present
/// (each entry lands in `out/sweep_NNN/`). Returns the top-level manifest
/// and the process exit code.
pub fn cmd_simulate(
    config_path: &Path,
    out_override: Option<&Path>,
    quiet: bool,
) -> Result<(RunManifest, i32)> {
    let config = RunConfig::from_path(config_path)?;
    let config_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let out_dir = resolve_out_dir(&config, out_override);

    if config.sweep.is_empty() {
        let (manifest, status) = run_one(&config, &config_dir, &out_dir, quiet)?;
        let code = if status.is_completed() { EXIT_OK } else { EXIT_BLOWUP };
        return Ok((manifest, code));
    }

    // sweep: one run per (k1, k2, c) tuple, fanned across workers
    std::fs::create_dir_all(&out_dir)?;
    let entries = config.sweep.clone();
    let results = parallel_map(entries, |i, entry| {
        let mut sub = config.clone();
        sub.params.k1 = entry.k1;
        sub.params.k2 = entry.k2;
        if let Some(c) = entry.c {
            sub.ic.c = Some(c);
        }
        sub.sweep.clear();
        let sub_dir = out_dir.join(format!("sweep_{i:03}"));
        run_one(&sub, &config_dir, &sub_dir, quiet)
    });

    let mut outputs = Vec::new();
    let mut worst = EXIT_OK;
    for r in results {
        let (manifest, status) = r?;
        outputs.extend(manifest.outputs);
        if !status.is_completed() {
            worst = EXIT_BLOWUP;
        }
    }
    let manifest = RunManifest {
        config_echo: config.clone(),
        grid: (config.grid.n_points, config.grid.length),
        params: config.gch_params(),
        initial_condition: config.ic_description(),
        outputs,
        status: if worst == EXIT_OK { "Completed".into() } else { "BlowUpSuspected".into() },
    };
    write_text(&out_dir.join("manifest.json"), &serde_json::to_string_pretty(&manifest)?)?;
    Ok((manifest, worst))
}

fn resolve_out_dir(config: &RunConfig, out_override: Option<&Path>) -> PathBuf {
    out_override
        .map(Path::to_path_buf)
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Per-root result of `peakon-verify`.
#[derive(Debug, Clone, Serialize)]
pub struct PeakonRootReport {
    pub c1_re: f64,
    pub c1_im: f64,
    pub is_real: bool,
    pub discriminant: f64,
    pub max_residual: Option<f64>,
    pub max_relative_residual: Option<f64>,
    pub pass: Option<bool>,
}

/// `peakon-verify`: solve the coefficient equation, run the weak-residual
/// family on every real root, report PASS/FAIL against `tolerance`
/// (relative to `scale(phi)`), and skip complex roots with their
/// discriminant. Optionally writes the scan CSV.
pub fn cmd_peakon_verify(
    k1: f64,
    k2: f64,
    c: f64,
    tolerance: f64,
    out_dir: Option<&Path>,
    quiet: bool,
) -> Result<(Vec<PeakonRootReport>, i32)> {
    let params = GchParams::new(k1, k2);
    let roots = peakon::peakon_coefficients(&params, c)?;

    let mut reports = Vec::new();
    let mut all_pass = true;
    for spec in &roots {
        if spec.is_real {
            let (max_abs, max_rel) = peakon::weak_residual_family(spec, &params)?;
            let pass = max_rel < tolerance;
            all_pass &= pass;
            if !quiet {
                println!(
                    "root C1 = {:+.12}: max residual {:.3e} ({:.3e} x scale) -> {}",
                    spec.c1.re,
                    max_abs,
                    max_rel,
                    if pass { "PASS" } else { "FAIL" }
                );
            }
            reports.push(PeakonRootReport {
                c1_re: spec.c1.re,
                c1_im: 0.0,
                is_real: true,
                discriminant: spec.discriminant,
                max_residual: Some(max_abs),
                max_relative_residual: Some(max_rel),
                pass: Some(pass),
            });
        } else {
            if !quiet {
                println!(
                    "root C1 = {:+.6}{:+.6}i: complex peakon regime, discriminant {}, \
                     residual test skipped",
                    spec.c1.re, spec.c1.im, spec.discriminant
                );
            }
            reports.push(PeakonRootReport {
                c1_re: spec.c1.re,
                c1_im: spec.c1.im,
                is_real: false,
                discriminant: spec.discriminant,
                max_residual: None,
                max_relative_residual: None,
                pass: None,
            });
        }
    }

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let mut text = String::from(peakon::SCAN_CSV_HEADER);
        text.push('\n');
        for spec in &roots {
            text.push_str(&peakon::scan_csv_row(&params, spec));
            text.push('\n');
        }
        write_text(&dir.join("peakon_scan.csv"), &text)?;
    }

    Ok((reports, if all_pass { EXIT_OK } else { EXIT_FAILED }))
}

/// `besov`: norm of a stored field, per-block CSV, and the `H^s` ratio for
/// `(p, r) = (2, 2)`.
pub fn cmd_besov(
    input: &Path,
    s: f64,
    p: f64,
    r: f64,
    out_dir: Option<&Path>,
    quiet: bool,
) -> Result<f64> {
    let field = read_field_csv(input)?;
    let idx = BesovIndex::new(s, p, r)?;
    let part = DyadicPartition::for_grid(field.grid());
    let norm = littlewood_paley::besov_norm(&field, &idx, &part);
    if !quiet {
        println!(
            "besov norm B^{s}_{{{p},{r}}} of {} ({} nodes, L = {}): {norm:.12e}",
            input.display(),
            field.grid().n_points(),
            field.grid().length()
        );
    }

    // per-block L^p norms (unweighted)
    let raw_idx = BesovIndex::new(0.0, p, r)?;
    let blocks = littlewood_paley::block_weights(&field, &raw_idx, &part);
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let mut text = String::from("q,norm_lp\n");
        for (q, w) in &blocks {
            text.push_str(&format!("{q},{w}\n"));
        }
        write_text(&dir.join("blocks.csv"), &text)?;
    }
    if !quiet {
        for (q, w) in &blocks {
            println!("  block {q:>3}: |Delta_q u|_Lp = {w:.6e}");
        }
    }

    if p == 2.0 && r == 2.0 {
        let h = littlewood_paley::sobolev_norm(&field, s);
        if h > 0.0 && !quiet {
            println!("  H^{s} norm {h:.12e}, ratio B/H = {:.6}", norm / h);
        }
    }
    Ok(norm)
}

/// Report from the Friedrichs contraction proxy.
#[derive(Debug, Clone, Serialize)]
pub struct FriedrichsReport {
    /// `sup_t` Besov distance between consecutive iterates; entry `i` is the
    /// move made by iterate `i+1` away from iterate `i`.
    pub distances: Vec<f64>,
    pub pass: bool,
}

/// `friedrichs`: iterate the frozen-coefficient scheme on the configured
/// initial data and print the consecutive-iterate `B^3_{2,2}` distance
/// table; PASS when the distances strictly decrease from iteration 2 on.
pub fn cmd_friedrichs(config_path: &Path, n_iters: usize, quiet: bool) -> Result<(FriedrichsReport, i32)> {
    if n_iters < 1 {
        return Err(Error::Config("friedrichs needs at least one iterate".into()));
    }
    let config = RunConfig::from_path(config_path)?;
    let config_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let grid = config.build_grid()?;
    let u0 = config.build_initial_condition(&grid, &config_dir)?;

    let h4 = littlewood_paley::sobolev_norm(&u0, 4.0);
    if h4 > 1.0 && !quiet {
        println!("warning: |u0|_H4 = {h4:.3} exceeds the small-data regime (bound 1.0)");
    }

    let params = config.gch_params();
    let trajs = evolve::friedrichs_iterate(&u0, &params, config.time.t_end, n_iters)?;
    let part = DyadicPartition::for_grid(&grid);
    let idx = BesovIndex::new(3.0, 2.0, 2.0)?;

    let mut distances = Vec::new();
    for i in 1..trajs.len() {
        distances.push(evolve::trajectory_besov_distance(&trajs[i - 1], &trajs[i], &idx, &part, 32));
    }
    if !quiet {
        println!("iter |  sup_t B^3_22 distance to previous");
        for (i, d) in distances.iter().enumerate() {
            println!("{:>4} |  {d:.9e}", i + 1);
        }
    }
    // strict decrease from the move of iterate 2 onward
    let pass = distances.len() >= 2 && distances.windows(2).skip(1).all(|w| w[1] < w[0]);
    if !quiet {
        println!("contraction proxy: {}", if pass { "PASS" } else { "FAIL" });
    }
    Ok((FriedrichsReport { distances, pass }, if pass { EXIT_OK } else { EXIT_FAILED }))
}

/// `blowup-scan`: rescale the configured initial profile to each amplitude
/// (profile normalized to unit height first), run, and report the first
/// time the monitor crosses `-threshold` as CSV `amplitude,t_cross` (empty
/// cell when it never crosses).
pub fn cmd_blowup_scan(
    config_path: &Path,
    out_override: Option<&Path>,
    quiet: bool,
) -> Result<(PathBuf, i32)> {
    let config = RunConfig::from_path(config_path)?;
    let config_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let scan = config
        .scan
        .clone()
        .ok_or_else(|| Error::Config("blowup-scan needs a [scan] section".into()))?;
    let grid = config.build_grid()?;
    let base = config.build_initial_condition(&grid, &config_dir)?;
    let height = base.max_abs();
    if height == 0.0 {
        return Err(Error::Config("scan initial condition is identically zero".into()));
    }
    let unit = base.scale(1.0 / height);
    let sim = config.sim_config()?;

    let rows = parallel_map(scan.amplitudes.clone(), |_, &amp| -> Result<String> {
        let traj = evolve::run(&unit.scale(amp), &sim)?;
        let cross = traj
            .diagnostics
            .iter()
            .find(|d| d.min_ux <= -scan.threshold || d.min_mux <= -scan.threshold)
            .map(|d| d.t);
        Ok(match cross {
            Some(t) => format!("{amp},{t}"),
            None => format!("{amp},"),
        })
    });

    let out_dir = resolve_out_dir(&config, out_override);
    std::fs::create_dir_all(&out_dir)?;
    let mut text = String::from("amplitude,t_cross\n");
    for row in rows {
        text.push_str(&row?);
        text.push('\n');
    }
    let path = out_dir.join("blowup_scan.csv");
    write_text(&path, &text)?;
    if !quiet {
        println!("wrote {}", path.display());
    }
    Ok((path, EXIT_OK))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_csv_roundtrip() {
        let dir = std::env::temp_dir().join(format!("gch_test_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let g = Grid::new(64, 40.0).unwrap();
        let f = Field::from_fn(&g, |x| (-x * x / 4.0).exp());
        let path = dir.join("field.csv");
        write_snapshot_csv(&path, &f).unwrap();
        let back = read_field_csv(&path).unwrap();
        assert!(back.grid().same_layout(&g));
        assert!(f.max_abs_diff(&back) < 1e-12);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn read_rejects_bad_header() {
        let dir = std::env::temp_dir().join(format!("gch_test_hdr_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_field_csv(&path).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn parallel_map_preserves_order() {
        let items: Vec<usize> = (0..40).collect();
        let out = parallel_map(items, |_, &x| x * x);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, i * i);
        }
    }
}
