//! The gCH right-hand side in its three equivalent forms.
//!
//! With `m = u - u_xx` and transport velocity
//! `a = (k1/2)(u^2 - u_x^2) + (k2/2) u`:
//!
//! - conservative: `m_t = (k1/2) ((u^2 - u_x^2) m)_x + (k2/2)(u m_x + 2 m u_x)`
//! - transport:    `m_t = a m_x + k1 u_x m^2 + k2 u_x m`
//! - nonlocal:     `u_t = (k1/2) u^2 u_x - (k1/6) u_x^3 + (k2/2) u u_x
//!                        + (k1/6) p * u_x^3
//!                        + (1/2) d/dx p * ( k1 (u u_x^2 + (2/3) u^3)
//!                                           + k2 (u^2 + (1/2) u_x^2) )`
//!
//! The first two produce the momentum tendency `m_t`, the third the velocity
//! tendency `u_t = (1 - d^2/dx^2)^{-1} m_t`. All pointwise products are
//! evaluated on a 2x zero-padded grid and truncated back: with factors
//! band-limited to `|j| <= n/2`, cubic product aliases land exactly on the
//! base Nyquist slot (which is zeroed), so the retained band is alias-free.
//! The 2/3 rule alone would not achieve that for cubic terms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::{Field, Grid};
use std::sync::Arc;

/// The constants `(k1, k2)` of the equation. `k1` scales the cubic terms,
/// `k2` the quadratic (Camassa-Holm) terms; no sign restriction here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GchParams {
    pub k1: f64,
    pub k2: f64,
}

impl GchParams {
    pub fn new(k1: f64, k2: f64) -> GchParams {
        GchParams { k1, k2 }
    }

    /// Camassa-Holm reduction `(0, -2)`.
    pub fn camassa_holm() -> GchParams {
        GchParams { k1: 0.0, k2: -2.0 }
    }

    /// Modified (cubic) Camassa-Holm reduction `(-2, 0)`.
    pub fn modified_camassa_holm() -> GchParams {
        GchParams { k1: -2.0, k2: 0.0 }
    }
}

/// Evaluation workspace: `u`, `u_x`, `m`, `m_x` sampled on either the base
/// grid or the 2x padded grid, plus the transforms to come back down.
struct ProductStage {
    grid: Arc<Grid>,
    padded: bool,
    wavenumbers: Vec<f64>,
    pub u: Vec<f64>,
    pub ux: Vec<f64>,
    pub m: Vec<f64>,
    pub mx: Vec<f64>,
}

impl ProductStage {
    fn new(u: &Field, dealias: bool) -> ProductStage {
        let grid = Arc::clone(u.grid());
        let base_spec = grid.forward(u.values());
        let spec = if dealias { grid.pad_spectrum(&base_spec) } else { base_spec };
        let wavenumbers: Vec<f64> = if dealias {
            grid.wavenumbers_padded().to_vec()
        } else {
            grid.wavenumbers().to_vec()
        };

        let with_symbol = |f: &dyn Fn(f64) -> Complex64| -> Vec<f64> {
            let mut s = spec.clone();
            for (c, &k) in s.iter_mut().zip(&wavenumbers) {
                *c *= f(k);
            }
            if !dealias {
                // odd symbols need the unpaired mode cleared on the base grid
                s[grid.nyquist_index()] = Complex64::new(0.0, 0.0);
            }
            if dealias {
                grid.inverse_padded(&s)
            } else {
                grid.inverse(&s)
            }
        };

        let u_vals = with_symbol(&|_| Complex64::new(1.0, 0.0));
        let ux = with_symbol(&|k| Complex64::new(0.0, k));
        let m = with_symbol(&|k| Complex64::new(1.0 + k * k, 0.0));
        let mx = with_symbol(&|k| Complex64::new(0.0, k * (1.0 + k * k)));
        ProductStage { grid, padded: dealias, wavenumbers, u: u_vals, ux, m, mx }
    }

    fn spectrum_of(&self, values: &[f64]) -> Vec<Complex64> {
        if self.padded {
            self.grid.forward_padded(values)
        } else {
            self.grid.forward(values)
        }
    }

    /// Bring a spectral result on the evaluation grid down to a base Field.
    fn finish(&self, mut spec: Vec<Complex64>) -> Field {
        if self.padded {
            spec = self.grid.truncate_spectrum(&spec);
        } else {
            spec[self.grid.nyquist_index()] = Complex64::new(0.0, 0.0);
        }
        Field::unchecked(&self.grid, self.grid.inverse(&spec))
    }

    fn apply_symbol(&self, spec: &mut [Complex64], sym: impl Fn(f64) -> Complex64) {
        for (c, &k) in spec.iter_mut().zip(&self.wavenumbers) {
            *c *= sym(k);
        }
    }
}

/// Conservative form: `m_t = (k1/2) ((u^2 - u_x^2) m)_x + (k2/2)(u m_x + 2 m u_x)`.
pub fn rhs_conservative(u: &Field, params: &GchParams) -> Field {
    rhs_conservative_with(u, params, true)
}

pub(crate) fn rhs_conservative_with(u: &Field, params: &GchParams, dealias: bool) -> Field {
    let st = ProductStage::new(u, dealias);
    let n = st.u.len();
    let mut flux = vec![0.0; n];
    let mut quad = vec![0.0; n];
    for i in 0..n {
        flux[i] = (st.u[i] * st.u[i] - st.ux[i] * st.ux[i]) * st.m[i];
        quad[i] = st.u[i] * st.mx[i] + 2.0 * st.m[i] * st.ux[i];
    }
    let mut flux_spec = st.spectrum_of(&flux);
    st.apply_symbol(&mut flux_spec, |k| Complex64::new(0.0, k));
    let quad_spec = st.spectrum_of(&quad);
    let combined: Vec<Complex64> = flux_spec
        .iter()
        .zip(&quad_spec)
        .map(|(f, q)| 0.5 * params.k1 * f + 0.5 * params.k2 * q)
        .collect();
    st.finish(combined)
}

/// Transport form: `m_t = a m_x + k1 u_x m^2 + k2 u_x m` with the velocity
/// `a = (k1/2)(u^2 - u_x^2) + (k2/2) u`.
pub fn rhs_transport(u: &Field, params: &GchParams) -> Field {
    rhs_transport_with(u, params, true)
}

pub(crate) fn rhs_transport_with(u: &Field, params: &GchParams, dealias: bool) -> Field {
    let st = ProductStage::new(u, dealias);
    let n = st.u.len();
    let vals: Vec<f64> = (0..n)
        .map(|i| {
            let a = 0.5 * params.k1 * (st.u[i] * st.u[i] - st.ux[i] * st.ux[i])
                + 0.5 * params.k2 * st.u[i];
            a * st.mx[i]
                + params.k1 * st.ux[i] * st.m[i] * st.m[i]
                + params.k2 * st.ux[i] * st.m[i]
        })
        .collect();
    let spec = st.spectrum_of(&vals);
    st.finish(spec)
}

/// Transport velocity `a = (k1/2)(u^2 - u_x^2) + (k2/2) u`, the
/// characteristic speed used for CFL control.
pub fn transport_velocity(u: &Field, params: &GchParams) -> Field {
    let grid = u.grid();
    let ux = crate::grid::spectral_derivative(u);
    let values = u
        .values()
        .iter()
        .zip(ux.values())
        .map(|(&uu, &dd)| 0.5 * params.k1 * (uu * uu - dd * dd) + 0.5 * params.k2 * uu)
        .collect();
    Field::unchecked(grid, values)
}

/// Nonlocal (velocity) form; returns `u_t` directly.
pub fn rhs_nonlocal(u: &Field, params: &GchParams) -> Field {
    rhs_nonlocal_with(u, params, true)
}

pub(crate) fn rhs_nonlocal_with(u: &Field, params: &GchParams, dealias: bool) -> Field {
    let st = ProductStage::new(u, dealias);
    let n = st.u.len();
    let (k1, k2) = (params.k1, params.k2);

    let mut local = vec![0.0; n];
    let mut ux_cubed = vec![0.0; n];
    let mut conv_arg = vec![0.0; n];
    for i in 0..n {
        let (uu, dd) = (st.u[i], st.ux[i]);
        local[i] = 0.5 * k1 * uu * uu * dd - k1 / 6.0 * dd * dd * dd + 0.5 * k2 * uu * dd;
        ux_cubed[i] = dd * dd * dd;
        conv_arg[i] = k1 * (uu * dd * dd + 2.0 / 3.0 * uu * uu * uu)
            + k2 * (uu * uu + 0.5 * dd * dd);
    }

    let local_spec = st.spectrum_of(&local);
    let mut smooth_spec = st.spectrum_of(&ux_cubed);
    st.apply_symbol(&mut smooth_spec, |k| Complex64::new(1.0 / (1.0 + k * k), 0.0));
    let mut deriv_spec = st.spectrum_of(&conv_arg);
    st.apply_symbol(&mut deriv_spec, |k| Complex64::new(0.0, k / (1.0 + k * k)));

    let combined: Vec<Complex64> = (0..n)
        .map(|i| local_spec[i] + k1 / 6.0 * smooth_spec[i] + 0.5 * deriv_spec[i])
        .collect();
    st.finish(combined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{helmholtz_apply, spectral_derivative};
    use std::sync::Arc;

    const TAU: f64 = std::f64::consts::TAU;

    fn unit_grid(n: usize) -> Arc<Grid> {
        Grid::new(n, TAU).unwrap()
    }

    #[test]
    fn zero_field_maps_to_zero_in_all_forms() {
        let g = unit_grid(64);
        let z = Field::zeros(&g);
        let p = GchParams::new(-1.3, 0.7);
        assert_eq!(rhs_conservative(&z, &p).max_abs(), 0.0);
        assert_eq!(rhs_transport(&z, &p).max_abs(), 0.0);
        assert_eq!(rhs_nonlocal(&z, &p).max_abs(), 0.0);
    }

    #[test]
    fn cosine_tendency_vanishes_at_origin() {
        // u = cos x, k1 = k2 = 1: at x = 0 all derivative factors vanish.
        let g = unit_grid(128);
        let u = Field::from_fn(&g, f64::cos);
        let p = GchParams::new(1.0, 1.0);
        let idx = g.n_points() / 2; // node at x = 0
        assert!((g.nodes()[idx]).abs() < 1e-14);
        assert!(rhs_conservative(&u, &p).values()[idx].abs() < 1e-11);
        assert!(rhs_transport(&u, &p).values()[idx].abs() < 1e-11);
    }

    #[test]
    fn constant_field_has_zero_velocity_tendency() {
        let g = unit_grid(64);
        let one = Field::from_fn(&g, |_| 1.0);
        let p = GchParams::new(1.0, 1.0);
        assert!(rhs_nonlocal(&one, &p).max_abs() < 1e-14);
        assert!(rhs_conservative(&one, &p).max_abs() < 1e-14);
    }

    #[test]
    fn conservative_and_transport_agree_on_cosine() {
        let g = unit_grid(256);
        let p = GchParams::new(1.0, 1.0);
        for c in [0.2, 1.0, -2.5] {
            let u = Field::from_fn(&g, |x| c * x.cos());
            let a = rhs_conservative(&u, &p);
            let b = rhs_transport(&u, &p);
            assert!(a.max_abs_diff(&b) < 1e-12 * a.max_abs().max(1.0), "c = {c}");
        }
    }

    #[test]
    fn conservative_and_transport_agree_on_two_mode_field() {
        let g = Grid::new(512, TAU).unwrap();
        let p = GchParams::new(-2.0, -2.0);
        let u = Field::from_fn(&g, |x| x.cos() + 0.3 * (2.0 * x).cos());
        let a = rhs_conservative(&u, &p);
        let b = rhs_transport(&u, &p);
        assert!(a.max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn nonlocal_form_is_helmholtz_preimage_of_conservative() {
        let g = Grid::new(2048, 40.0).unwrap();
        let p = GchParams::new(-1.0, -1.5);
        let u = Field::from_fn(&g, |x| 0.8 / x.cosh());
        let via_nonlocal = helmholtz_apply(&rhs_nonlocal(&u, &p));
        let direct = rhs_conservative(&u, &p);
        assert!(via_nonlocal.max_abs_diff(&direct) < 1e-8);
    }

    #[test]
    fn parameter_linearity_is_exact() {
        let g = unit_grid(128);
        let u = Field::from_fn(&g, |x| 0.5 * x.cos() + 0.2 * (3.0 * x).sin());
        let (k1, k2) = (-1.7, 0.9);
        for rhs in [rhs_conservative, rhs_transport, rhs_nonlocal] {
            let full = rhs(&u, &GchParams::new(k1, k2));
            let split = rhs(&u, &GchParams::new(k1, 0.0))
                .scaled_add(1.0, &rhs(&u, &GchParams::new(0.0, k2)));
            assert!(full.max_abs_diff(&split) < 1e-13 * full.max_abs().max(1.0));
        }
    }

    #[test]
    fn camassa_holm_reduction() {
        // (k1, k2) = (0, -2) must give m_t = -(u m_x + 2 u_x m); products are
        // exact on the base grid for this band-limited u, so a naive
        // pointwise evaluation serves as the independent reference.
        let g = unit_grid(256);
        let u = Field::from_fn(&g, |x| 0.3 * x.cos() + 0.1 * (2.0 * x).sin());
        let m = helmholtz_apply(&u);
        let mx = spectral_derivative(&m);
        let ux = spectral_derivative(&u);
        let vals: Vec<f64> = (0..g.n_points())
            .map(|i| -(u.values()[i] * mx.values()[i] + 2.0 * ux.values()[i] * m.values()[i]))
            .collect();
        let reference = Field::new(&g, vals).unwrap();
        let got = rhs_transport(&u, &GchParams::camassa_holm());
        assert!(got.max_abs_diff(&reference) < 1e-10);
    }

    #[test]
    fn cubic_reduction() {
        // (k1, k2) = (-2, 0) must give m_t = -((u^2 - u_x^2) m)_x.
        let g = unit_grid(256);
        let u = Field::from_fn(&g, |x| 0.3 * x.cos() + 0.1 * (2.0 * x).sin());
        let m = helmholtz_apply(&u);
        let ux = spectral_derivative(&u);
        let flux: Vec<f64> = (0..g.n_points())
            .map(|i| {
                (u.values()[i] * u.values()[i] - ux.values()[i] * ux.values()[i]) * m.values()[i]
            })
            .collect();
        let reference = spectral_derivative(&Field::new(&g, flux).unwrap()).scale(-1.0);
        let got = rhs_conservative(&u, &GchParams::modified_camassa_holm());
        assert!(got.max_abs_diff(&reference) < 1e-10);
    }

    #[test]
    fn padding_is_inert_for_strongly_band_limited_fields() {
        // with all modes below n/4 the base-grid products are already exact,
        // so the dealiased and plain paths must agree to rounding
        let g = unit_grid(256);
        let u = Field::from_fn(&g, |x| 0.4 * x.cos() + 0.2 * (3.0 * x).sin());
        let p = GchParams::new(-2.0, -2.0);
        for (with_pad, without) in [
            (rhs_conservative_with(&u, &p, true), rhs_conservative_with(&u, &p, false)),
            (rhs_transport_with(&u, &p, true), rhs_transport_with(&u, &p, false)),
            (rhs_nonlocal_with(&u, &p, true), rhs_nonlocal_with(&u, &p, false)),
        ] {
            let defect = with_pad.max_abs_diff(&without);
            assert!(
                defect < 1e-11 * with_pad.max_abs().max(1.0),
                "defect {defect:.3e} vs scale {:.3e}",
                with_pad.max_abs()
            );
        }
    }

    #[test]
    fn output_spectrum_stays_hermitian() {
        // real-input reality check: coefficients of the tendency match their
        // mirrored conjugates to rounding.
        let g = unit_grid(128);
        let u = Field::from_fn(&g, |x| 0.4 * x.cos() + 0.2 * (4.0 * x).sin());
        let out = rhs_conservative(&u, &GchParams::new(-2.0, -2.0));
        let spec = out.spectrum();
        let n = g.n_points();
        for j in 1..n / 2 {
            let defect = (spec[j] - spec[n - j].conj()).norm();
            assert!(defect < 1e-13, "mode {j}: {defect:.3e}");
        }
    }
}
