//! Method-of-lines time integration.
//!
//! The semi-discrete system is `u_t = (1 - d^2/dx^2)^{-1} m_t` with the
//! dealiased conservative right-hand side; the Helmholtz inverse keeps the
//! tendency non-stiff at moderate resolution, so classical RK4 with an
//! adaptive CFL step
//!
//! ```text
//! dt = min(dt_init, cfl * dx / max(1, max_x |a(u)|)),
//! a = (k1/2)(u^2 - u_x^2) + (k2/2) u
//! ```
//!
//! gives clean 4th-order self-convergence. `a` is the characteristic speed
//! of the momentum transport, so its growth is exactly the signal that
//! precedes wave breaking: the run stops with a `BlowUpSuspected` status when
//! `dt` falls below `dt_min` or a stage goes non-finite.
//!
//! [`friedrichs_iterate`] implements the frozen-coefficient approximation
//! scheme: iterate `n+1` solves the linear transport problem
//!
//! ```text
//! m(n+1)_t - [ (k1/2)((u(n))^2 - (u(n)_x)^2) + (k2/2) u(n) ] m(n+1)_x
//!     = k1 u(n)_x (m(n))^2 + k2 u(n)_x m(n),     u(n+1)|_{t=0} = S_{n+1} u0,
//! ```
//!
//! with `u(0) = 0` and the frozen fields interpolated linearly in time from
//! the previous iterate's stored trajectory.

use std::sync::Arc;

use serde::Serialize;

use crate::equation::{rhs_conservative_with, transport_velocity, GchParams};
use crate::grid::{helmholtz_apply, helmholtz_inverse, spectral_derivative, Field, Grid};
use crate::invariants::DiagnosticsRecord;
use crate::littlewood_paley::{self, BesovIndex, DyadicPartition};
use crate::{Error, Result};

/// Time-integration configuration.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub params: GchParams,
    pub t_end: f64,
    pub dt_init: f64,
    pub cfl: f64,
    pub dt_min: f64,
    pub dealias: bool,
    pub record_every: usize,
    /// Hard cap on accepted steps; exceeding it aborts the run with an
    /// explicit error instead of grinding at a collapsed step size.
    pub max_steps: usize,
}

impl SimConfig {
    pub fn new(params: GchParams, t_end: f64) -> SimConfig {
        SimConfig {
            params,
            t_end,
            dt_init: 0.01,
            cfl: 0.3,
            dt_min: 1e-9,
            dealias: true,
            record_every: 1,
            max_steps: 20_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_end.is_nan() || self.t_end < 0.0 {
            return Err(Error::Config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.dt_init.is_nan() || self.dt_init <= 0.0 {
            return Err(Error::Config(format!("dt_init must be > 0, got {}", self.dt_init)));
        }
        if self.dt_min.is_nan() || self.dt_min <= 0.0 || self.dt_min >= self.dt_init {
            return Err(Error::Config(format!(
                "dt_min must satisfy 0 < dt_min < dt_init, got {}",
                self.dt_min
            )));
        }
        if self.cfl.is_nan() || self.cfl <= 0.0 || self.cfl > 1.0 {
            return Err(Error::Config(format!("cfl must be in (0, 1], got {}", self.cfl)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// Why a run stopped before `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    DtCollapsed,
    NonFinite,
}

/// Terminal status of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RunStatus {
    Completed,
    BlowUpSuspected { t_stop: f64, reason: StopReason },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

/// Recorded states and diagnostics of a run; immutable once returned.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Field>,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub status: RunStatus,
}

impl Trajectory {
    pub fn grid(&self) -> &Arc<Grid> {
        self.states[0].grid()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial record")
    }

    pub fn final_state(&self) -> &Field {
        self.states.last().expect("trajectory has at least the initial record")
    }

    /// State at time `t` by linear interpolation between records (clamped to
    /// the recorded range).
    pub fn sample(&self, t: f64) -> Field {
        let times = &self.times;
        if t <= times[0] {
            return self.states[0].clone();
        }
        if t >= *times.last().unwrap() {
            return self.final_state().clone();
        }
        let hi = times.partition_point(|&s| s <= t);
        let (t0, t1) = (times[hi - 1], times[hi]);
        let w = (t - t0) / (t1 - t0);
        self.states[hi - 1].scale(1.0 - w).scaled_add(w, &self.states[hi])
    }
}

/// One classical RK4 step of `u_t = (1 - d^2/dx^2)^{-1} m_t(u)`.
pub fn rk4_step(u: &Field, dt: f64, params: &GchParams) -> Result<Field> {
    rk4_step_with(u, dt, params, true)
}

fn tendency(u: &Field, params: &GchParams, dealias: bool) -> Field {
    helmholtz_inverse(&rhs_conservative_with(u, params, dealias))
}

pub(crate) fn rk4_step_with(u: &Field, dt: f64, params: &GchParams, dealias: bool) -> Result<Field> {
    assert!(dt > 0.0, "dt must be positive");
    let f = |v: &Field| tendency(v, params, dealias);
    rk4_generic(u, dt, f)
}

/// RK4 for an autonomous tendency; shared by the nonlinear and the
/// frozen-coefficient solvers (the latter bakes time into the closure).
fn rk4_generic(u: &Field, dt: f64, f: impl Fn(&Field) -> Field) -> Result<Field> {
    let k1 = f(u);
    let k2 = f(&u.scaled_add(0.5 * dt, &k1));
    let k3 = f(&u.scaled_add(0.5 * dt, &k2));
    let k4 = f(&u.scaled_add(dt, &k3));
    let mut out = u.clone();
    for (w, k) in [(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)] {
        out = out.scaled_add(w * dt / 6.0, k);
    }
    if !out.is_finite() {
        return Err(Error::NonFinite { t: f64::NAN });
    }
    Ok(out)
}

/// Non-autonomous RK4 where the tendency takes the stage time.
fn rk4_timed(u: &Field, t: f64, dt: f64, f: impl Fn(f64, &Field) -> Field) -> Result<Field> {
    let k1 = f(t, u);
    let k2 = f(t + 0.5 * dt, &u.scaled_add(0.5 * dt, &k1));
    let k3 = f(t + 0.5 * dt, &u.scaled_add(0.5 * dt, &k2));
    let k4 = f(t + dt, &u.scaled_add(dt, &k3));
    let mut out = u.clone();
    for (w, k) in [(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)] {
        out = out.scaled_add(w * dt / 6.0, k);
    }
    if !out.is_finite() {
        return Err(Error::NonFinite { t });
    }
    Ok(out)
}

/// Integrate to `t_end` with adaptive CFL stepping, recording state and
/// diagnostics at step 0, every `record_every` accepted steps, and at the
/// final state. Stops early (status `BlowUpSuspected`) when the step
/// collapses below `dt_min` or a stage goes non-finite.
pub fn run(u0: &Field, config: &SimConfig) -> Result<Trajectory> {
    config.validate()?;
    if !u0.is_finite() {
        return Err(Error::InvalidField("initial data must be finite".into()));
    }
    let dx = u0.grid().spacing();
    let params = config.params;

    let mut t = 0.0;
    let mut u = u0.clone();
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    let mut diagnostics = vec![DiagnosticsRecord::compute(0.0, &u, &params)];
    let mut status = RunStatus::Completed;
    let mut steps_since_record = 0usize;
    let mut steps = 0usize;

    let record = |t: f64, u: &Field, times: &mut Vec<f64>, states: &mut Vec<Field>, diags: &mut Vec<DiagnosticsRecord>| {
        times.push(t);
        states.push(u.clone());
        diags.push(DiagnosticsRecord::compute(t, u, &params));
    };

    while t < config.t_end {
        let speed = transport_velocity(&u, &params).max_abs().max(1.0);
        let mut dt = config.dt_init.min(config.cfl * dx / speed);
        if dt < config.dt_min {
            status = RunStatus::BlowUpSuspected { t_stop: t, reason: StopReason::DtCollapsed };
            break;
        }
        let clipped = dt >= config.t_end - t;
        if clipped {
            dt = config.t_end - t;
        }
        match rk4_step_with(&u, dt, &params, config.dealias) {
            Ok(next) => {
                u = next;
                t = if clipped { config.t_end } else { t + dt };
                steps += 1;
                steps_since_record += 1;
                if steps_since_record == config.record_every || t >= config.t_end {
                    record(t, &u, &mut times, &mut states, &mut diagnostics);
                    steps_since_record = 0;
                }
                if steps > config.max_steps {
                    return Err(Error::StepLimit(config.max_steps));
                }
            }
            Err(Error::NonFinite { .. }) => {
                status = RunStatus::BlowUpSuspected { t_stop: t, reason: StopReason::NonFinite };
                break;
            }
            Err(e) => return Err(e),
        }
    }

    // make sure the last accepted state is on record even when stopping early
    if t > *times.last().unwrap() {
        record(t, &u, &mut times, &mut states, &mut diagnostics);
    }

    Ok(Trajectory { times, states, diagnostics, status })
}

/// Fixed number of uniform steps used by every Friedrichs iterate, so all
/// iterates share one time grid and interpolation differences cancel in the
/// contraction distances.
const FRIEDRICHS_STEPS: usize = 64;

/// Run the frozen-coefficient iteration scheme. Returns the `n_iters + 1`
/// trajectories `u(0) = 0, u(1), .., u(n_iters)`; iterate `i` starts from the
/// low-frequency cutoff `S_i u0` (clamped to the grid's resolvable range) and
/// transports against the previous iterate.
pub fn friedrichs_iterate(
    u0: &Field,
    params: &GchParams,
    t_end: f64,
    n_iters: usize,
) -> Result<Vec<Trajectory>> {
    assert!(n_iters >= 1, "need at least one iterate");
    if t_end.is_nan() || t_end <= 0.0 {
        return Err(Error::Config(format!("t_end must be > 0, got {t_end}")));
    }
    let grid = u0.grid();
    let part = DyadicPartition::for_grid(grid);
    let dt = t_end / FRIEDRICHS_STEPS as f64;

    let zero = Field::zeros(grid);
    let mut trajs = vec![zero_trajectory(&zero, t_end, params)];
    let mut first_sup = None;

    for i in 1..=n_iters {
        let start = littlewood_paley::low_cutoff_clamped(u0, i as i32, &part);
        let prev = trajs.last().unwrap();
        let traj = linear_transport_run(&start, prev, params, dt, t_end)?;

        let sup = traj.states.iter().map(Field::max_abs).fold(0.0_f64, f64::max);
        match first_sup {
            None => first_sup = Some(sup.max(f64::MIN_POSITIVE)),
            Some(first) => {
                let ratio = sup / first;
                if ratio > 1e3 {
                    return Err(Error::IterateDiverged { index: i, ratio });
                }
            }
        }
        trajs.push(traj);
    }
    Ok(trajs)
}

fn zero_trajectory(zero: &Field, t_end: f64, params: &GchParams) -> Trajectory {
    let times: Vec<f64> = (0..=FRIEDRICHS_STEPS)
        .map(|i| t_end * i as f64 / FRIEDRICHS_STEPS as f64)
        .collect();
    let states = vec![zero.clone(); times.len()];
    let diagnostics =
        times.iter().map(|&t| DiagnosticsRecord::compute(t, zero, params)).collect();
    Trajectory { times, states, diagnostics, status: RunStatus::Completed }
}

/// Integrate the linear frozen-coefficient equation against `prev`,
/// recording every step.
fn linear_transport_run(
    start: &Field,
    prev: &Trajectory,
    params: &GchParams,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    let params = *params;
    let tendency = |t: f64, u_new: &Field| -> Field {
        let frozen = prev.sample(t);
        frozen_transport_tendency(u_new, &frozen, &params)
    };

    let mut u = start.clone();
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    let mut diagnostics = vec![DiagnosticsRecord::compute(0.0, &u, &params)];
    for step in 1..=FRIEDRICHS_STEPS {
        u = rk4_timed(&u, t, dt, tendency)?;
        t = t_end * step as f64 / FRIEDRICHS_STEPS as f64;
        times.push(t);
        states.push(u.clone());
        diagnostics.push(DiagnosticsRecord::compute(t, &u, &params));
    }
    Ok(Trajectory { times, states, diagnostics, status: RunStatus::Completed })
}

/// `u_t` for the linear transport equation with coefficients frozen at the
/// previous iterate: `m_t = a(w) m_x + k1 w_x m(w)^2 + k2 w_x m(w)` where `w`
/// is the frozen field and `m = (1 - d^2/dx^2) u_new`.
fn frozen_transport_tendency(u_new: &Field, frozen: &Field, params: &GchParams) -> Field {
    let grid = u_new.grid();
    let a = transport_velocity(frozen, params);
    let w_x = spectral_derivative(frozen);
    let w_m = helmholtz_apply(frozen);
    let m_x = spectral_derivative(&helmholtz_apply(u_new));

    // products of band-limited smooth factors; evaluated on the base grid
    // and then smoothed through the Helmholtz inverse
    let vals: Vec<f64> = (0..grid.n_points())
        .map(|i| {
            a.values()[i] * m_x.values()[i]
                + params.k1 * w_x.values()[i] * w_m.values()[i] * w_m.values()[i]
                + params.k2 * w_x.values()[i] * w_m.values()[i]
        })
        .collect();
    helmholtz_inverse(&Field::unchecked(grid, vals))
}

/// `sup_t` of the Besov distance between two trajectories, sampled at
/// `samples` uniform times across the overlap of their recorded ranges.
pub fn trajectory_besov_distance(
    a: &Trajectory,
    b: &Trajectory,
    idx: &BesovIndex,
    part: &DyadicPartition,
    samples: usize,
) -> f64 {
    let t_hi = a.final_time().min(b.final_time());
    let mut sup = 0.0_f64;
    for i in 0..=samples {
        let t = t_hi * i as f64 / samples as f64;
        let diff = a.sample(t).scaled_add(-1.0, &b.sample(t));
        sup = sup.max(littlewood_paley::besov_norm(&diff, idx, part));
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants;

    fn wide_grid(n: usize) -> Arc<Grid> {
        Grid::new(n, 40.0).unwrap()
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let g = wide_grid(64);
        let z = Field::zeros(&g);
        let p = GchParams::new(-1.0, -1.0);
        let next = rk4_step(&z, 0.1, &p).unwrap();
        assert_eq!(next.max_abs(), 0.0);
    }

    #[test]
    fn constants_are_fixed_points() {
        let g = wide_grid(64);
        let c = Field::from_fn(&g, |_| 0.75);
        let p = GchParams::new(1.0, 1.0);
        let next = rk4_step(&c, 0.05, &p).unwrap();
        assert!(next.max_abs_diff(&c) < 1e-13);
    }

    #[test]
    fn fourth_order_self_convergence() {
        let g = wide_grid(256);
        let u0 = Field::from_fn(&g, |x| 0.5 * (-x * x).exp());
        let p = GchParams::new(-1.0, -1.0);
        let t_end = 0.1;

        let integrate = |dt: f64| -> Field {
            let steps = (t_end / dt).round() as usize;
            let mut u = u0.clone();
            for _ in 0..steps {
                u = rk4_step(&u, t_end / steps as f64, &p).unwrap();
            }
            u
        };

        let reference = integrate(0.004 / 16.0);
        let err_coarse = integrate(0.004).max_abs_diff(&reference);
        let err_fine = integrate(0.002).max_abs_diff(&reference);
        let ratio = err_coarse / err_fine;
        assert!(
            (12.8..=19.2).contains(&ratio),
            "expected ~16x error reduction, got {ratio:.2} ({err_coarse:.3e} -> {err_fine:.3e})"
        );
    }

    #[test]
    fn zero_initial_data_runs_to_completion() {
        let g = wide_grid(64);
        let mut cfg = SimConfig::new(GchParams::new(-1.0, -1.0), 1.0);
        cfg.dt_init = 0.05;
        let traj = run(&Field::zeros(&g), &cfg).unwrap();
        assert!(traj.status.is_completed());
        assert_eq!(traj.final_time(), 1.0);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert!(traj.diagnostics.iter().all(|d| d.h1 == 0.0));
    }

    #[test]
    fn run_rejects_bad_config() {
        let g = wide_grid(64);
        let mut cfg = SimConfig::new(GchParams::new(0.0, -2.0), 1.0);
        cfg.cfl = 0.0;
        assert!(matches!(run(&Field::zeros(&g), &cfg), Err(Error::Config(_))));
        let mut cfg2 = SimConfig::new(GchParams::new(0.0, -2.0), 1.0);
        cfg2.dt_min = 1.0;
        assert!(matches!(run(&Field::zeros(&g), &cfg2), Err(Error::Config(_))));
    }

    #[test]
    fn spatial_resolution_is_converged() {
        let p = GchParams::new(-1.0, -1.0);
        let mut final_states = Vec::new();
        for n in [256usize, 512] {
            let g = wide_grid(n);
            let u0 = Field::from_fn(&g, |x| 0.4 * (-x * x / 2.0).exp());
            let mut cfg = SimConfig::new(p, 0.5);
            cfg.dt_init = 2e-3;
            let traj = run(&u0, &cfg).unwrap();
            final_states.push(traj.final_state().clone());
        }
        // compare the coarse state against the fine one on shared nodes
        let coarse = &final_states[0];
        let fine = &final_states[1];
        let mut worst = 0.0_f64;
        for j in 0..coarse.grid().n_points() {
            worst = worst.max((coarse.values()[j] - fine.values()[2 * j]).abs());
        }
        assert!(worst < 1e-8, "doubling n moved the final state by {worst:.3e}");
    }

    #[test]
    fn traveling_peakon_quick_check() {
        // mollified CH peakon travels at close to unit speed and keeps shape
        let g = Grid::new(1024, 40.0).unwrap();
        let p = GchParams::camassa_holm();
        let spec = crate::peakon::peakon_coefficients(&p, 1.0).unwrap().remove(0);
        let u0 = crate::peakon::periodized_peakon(&spec, &g, 2.0 * g.spacing()).unwrap();
        let cfg = SimConfig::new(p, 1.0);
        let traj = run(&u0, &cfg).unwrap();
        assert!(traj.status.is_completed());

        let track: Vec<f64> = traj.diagnostics.iter().map(|d| d.peak_x).collect();
        let unwrapped = invariants::unwrap_track(&track, 40.0);
        let speed = (unwrapped.last().unwrap() - unwrapped[0]) / traj.final_time();
        assert!((speed - 1.0).abs() < 0.02, "peak speed {speed}");
    }

    #[test]
    fn evolved_fields_stay_real() {
        // Hermitian-symmetry defect of the spectrum after several steps
        let g = wide_grid(128);
        let mut u = Field::from_fn(&g, |x| 0.5 * (-x * x / 2.0).exp() + 0.1 * (-(x - 3.0).powi(2)).exp());
        let p = GchParams::new(-1.0, -2.0);
        for _ in 0..10 {
            u = rk4_step(&u, 5e-3, &p).unwrap();
        }
        let spec = u.spectrum();
        let n = g.n_points();
        let mut defect = 0.0_f64;
        for j in 1..n / 2 {
            defect = defect.max((spec[j] - spec[n - j].conj()).norm());
        }
        assert!(defect < 1e-13, "reality defect {defect:.3e}");
    }

    #[test]
    fn friedrichs_limit_matches_nonlinear_run() {
        let g = wide_grid(256);
        let base = Field::from_fn(&g, |x| (-x * x / 8.0).exp());
        let h4 = crate::littlewood_paley::sobolev_norm(&base, 4.0);
        let u0 = base.scale(0.1 / h4);
        let p = GchParams::new(-2.0, -2.0);
        let trajs = friedrichs_iterate(&u0, &p, 0.2, 6).unwrap();
        let mut cfg = SimConfig::new(p, 0.2);
        cfg.dt_init = 0.2 / 64.0;
        let full = run(&u0, &cfg).unwrap();
        let gap = full.final_state().max_abs_diff(trajs.last().unwrap().final_state());
        assert!(gap < 1e-10, "cascade limit off by {gap:.3e}");
    }

    #[test]
    fn friedrichs_zero_data_stays_zero() {
        let g = wide_grid(64);
        let p = GchParams::new(-2.0, -2.0);
        let trajs = friedrichs_iterate(&Field::zeros(&g), &p, 0.2, 3).unwrap();
        assert_eq!(trajs.len(), 4);
        for traj in &trajs {
            assert!(traj.states.iter().all(|s| s.max_abs() == 0.0));
        }
    }

    #[test]
    fn friedrichs_initial_data_is_frequency_truncated() {
        let g = Grid::new(256, std::f64::consts::TAU).unwrap();
        // broadband data: every cosine mode up to 40
        let u0 = Field::from_fn(&g, |x| {
            (1..=40).map(|j| (j as f64 * x).cos() / j as f64).sum::<f64>() * 0.02
        });
        let p = GchParams::new(-2.0, -2.0);
        let trajs = friedrichs_iterate(&u0, &p, 0.05, 2).unwrap();
        // iterate 1 starts from S_1 u0: spectrum vanishes for |k| >= 8/3
        let spec = trajs[1].states[0].spectrum();
        for (c, &k) in spec.iter().zip(g.wavenumbers()) {
            if k.abs() >= 8.0 / 3.0 {
                assert!(c.norm() < 1e-14, "k = {k}: |c| = {:.3e}", c.norm());
            }
        }
    }

    #[test]
    fn interpolation_is_linear_between_records() {
        let g = wide_grid(64);
        let a = Field::from_fn(&g, |x| (-x * x).exp());
        let traj = Trajectory {
            times: vec![0.0, 1.0],
            states: vec![Field::zeros(&g), a.clone()],
            diagnostics: vec![
                DiagnosticsRecord::compute(0.0, &Field::zeros(&g), &GchParams::new(0.0, -2.0)),
                DiagnosticsRecord::compute(1.0, &a, &GchParams::new(0.0, -2.0)),
            ],
            status: RunStatus::Completed,
        };
        let mid = traj.sample(0.25);
        assert!(mid.max_abs_diff(&a.scale(0.25)) < 1e-15);
    }
}
