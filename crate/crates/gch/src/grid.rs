//! Periodic collocation grid, transform conventions, and the spectral
//! operator set: `d/dx`, the Helmholtz pair `u <-> m = (1 - d^2/dx^2) u`, and
//! the peakon-kernel derivative convolution `d/dx (p * f)` with
//! `p(x) = e^{-|x|}/2`.
//!
//! Conventions, fixed once here and relied on everywhere else:
//!
//! - nodes `x_j = -L/2 + j L/n`, `j = 0..n`, `n` even;
//! - wavenumbers `k_j = (2 pi / L) j` for `j in {-n/2, .., n/2-1}`, stored in
//!   FFT order (`0, 1, .., n/2-1, -n/2, .., -1`);
//! - the forward transform divides by `n`, so coefficients are the trig-poly
//!   coefficients `c_k` with `u(x) = sum_k c_k e^{i k x}` and diagnostics are
//!   grid-size independent;
//! - odd-symbol operators (anything containing a bare `ik`) zero the Nyquist
//!   mode so derivatives of real fields stay real.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Uniform periodic grid of even size with cached FFT plans for the base
/// resolution and its 2x zero-padded companion (used for dealiased products).
pub struct Grid {
    n_points: usize,
    length: f64,
    nodes: Vec<f64>,
    wavenumbers: Vec<f64>,
    wavenumbers_padded: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    fwd_pad: Arc<dyn Fft<f64>>,
    inv_pad: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_points", &self.n_points)
            .field("length", &self.length)
            .finish()
    }
}

impl Grid {
    /// Build a grid with `n_points` nodes (even, at least 8) on a periodic
    /// domain of period `length`.
    pub fn new(n_points: usize, length: f64) -> Result<Arc<Grid>> {
        if n_points < 8 || !n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_points must be even and >= 8, got {n_points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        let n = n_points;
        let dx = length / n as f64;
        let nodes = (0..n).map(|j| -0.5 * length + j as f64 * dx).collect();
        let wavenumbers = fft_wavenumbers(n, length);
        let wavenumbers_padded = fft_wavenumbers(2 * n, length);
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            n_points: n,
            length,
            nodes,
            wavenumbers,
            wavenumbers_padded,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            fwd_pad: planner.plan_fft_forward(2 * n),
            inv_pad: planner.plan_fft_inverse(2 * n),
        }))
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Node spacing `L / n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n_points as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Wavenumbers in FFT order; index `n/2` holds the lone Nyquist mode
    /// `-(2 pi / L)(n/2)`.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub(crate) fn wavenumbers_padded(&self) -> &[f64] {
        &self.wavenumbers_padded
    }

    pub(crate) fn nyquist_index(&self) -> usize {
        self.n_points / 2
    }

    /// Two grids are interchangeable when they share size and period.
    pub fn same_layout(&self, other: &Grid) -> bool {
        self.n_points == other.n_points && self.length == other.length
    }

    /// Forward transform of real samples; divides by `n`.
    pub(crate) fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.n_points);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.n_points as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Inverse transform to real samples (imaginary parts dropped).
    pub(crate) fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(spectrum.len(), self.n_points);
        let mut buf = spectrum.to_vec();
        self.inv.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    pub(crate) fn forward_padded(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), 2 * self.n_points);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd_pad.process(&mut buf);
        let scale = 1.0 / (2 * self.n_points) as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    pub(crate) fn inverse_padded(&self, spectrum: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(spectrum.len(), 2 * self.n_points);
        let mut buf = spectrum.to_vec();
        self.inv_pad.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Zero-pad a base spectrum onto the 2x grid. The base Nyquist
    /// coefficient is split evenly between `+n/2` and `-n/2` so real fields
    /// upsample to real fields.
    pub(crate) fn pad_spectrum(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let n = self.n_points;
        debug_assert_eq!(spectrum.len(), n);
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
        out[..n / 2].copy_from_slice(&spectrum[..n / 2]);
        for j in 1..n / 2 {
            out[2 * n - j] = spectrum[n - j];
        }
        let half_nyq = 0.5 * spectrum[n / 2];
        out[n / 2] = half_nyq;
        out[2 * n - n / 2] = half_nyq;
        out
    }

    /// Truncate a padded spectrum back to the base band. Modes `|j| < n/2`
    /// are copied; the base Nyquist slot is zeroed (it is exactly where
    /// residual cubic aliases land on the 2x grid).
    pub(crate) fn truncate_spectrum(&self, padded: &[Complex64]) -> Vec<Complex64> {
        let n = self.n_points;
        debug_assert_eq!(padded.len(), 2 * n);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        out[..n / 2].copy_from_slice(&padded[..n / 2]);
        for j in 1..n / 2 {
            out[n - j] = padded[2 * n - j];
        }
        out
    }
}

/// Wavenumbers `(2 pi / L) j` in FFT index order for an `n`-point grid.
fn fft_wavenumbers(n: usize, length: f64) -> Vec<f64> {
    let dk = 2.0 * std::f64::consts::PI / length;
    (0..n)
        .map(|i| {
            let j = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
            dk * j as f64
        })
        .collect()
}

/// A real-valued function sampled on a [`Grid`]. Immutable once constructed;
/// operators return new fields.
#[derive(Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("grid", &*self.grid)
            .field("max_abs", &self.max_abs())
            .finish()
    }
}

impl Field {
    /// Validating constructor: length must match the grid, values finite.
    pub fn new(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                grid.n_points(),
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidField("non-finite sample".into()));
        }
        Ok(Field { grid: Arc::clone(grid), values })
    }

    pub(crate) fn unchecked(grid: &Arc<Grid>, values: Vec<f64>) -> Field {
        debug_assert_eq!(values.len(), grid.n_points());
        Field { grid: Arc::clone(grid), values }
    }

    /// Sample a closure at the grid nodes.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: &Arc<Grid>, f: F) -> Field {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Field { grid: Arc::clone(grid), values }
    }

    /// Synthesize a field from trig-poly coefficients (inverse transform;
    /// imaginary parts of the samples are dropped).
    pub fn from_spectrum(grid: &Arc<Grid>, spectrum: &[Complex64]) -> Result<Field> {
        if spectrum.len() != grid.n_points() {
            return Err(Error::InvalidField(format!(
                "expected {} coefficients, got {}",
                grid.n_points(),
                spectrum.len()
            )));
        }
        Ok(Field { grid: Arc::clone(grid), values: grid.inverse(spectrum) })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Field {
        Field { grid: Arc::clone(grid), values: vec![0.0; grid.n_points()] }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, &v| a.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Trig-poly coefficients of the field (forward transform).
    pub fn spectrum(&self) -> Vec<Complex64> {
        self.grid.forward(&self.values)
    }

    /// `self + factor * other`; the fields must share a grid layout.
    pub fn scaled_add(&self, factor: f64, other: &Field) -> Field {
        assert!(self.grid.same_layout(&other.grid), "grid mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + factor * b)
            .collect();
        Field { grid: Arc::clone(&self.grid), values }
    }

    pub fn scale(&self, factor: f64) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| factor * v).collect(),
        }
    }

    /// Max-norm distance to another field on the same layout.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        assert!(self.grid.same_layout(&other.grid), "grid mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |a, (&x, &y)| a.max((x - y).abs()))
    }
}

/// Apply a Fourier multiplier `m(k)`; `zero_nyquist` clears the unpaired
/// mode (required whenever `m` is odd in `k`).
fn apply_multiplier<M: Fn(f64) -> Complex64>(f: &Field, m: M, zero_nyquist: bool) -> Field {
    let grid = f.grid();
    let mut spec = grid.forward(f.values());
    for (c, &k) in spec.iter_mut().zip(grid.wavenumbers()) {
        *c *= m(k);
    }
    if zero_nyquist {
        spec[grid.nyquist_index()] = Complex64::new(0.0, 0.0);
    }
    Field::unchecked(grid, grid.inverse(&spec))
}

/// Fourier-collocation derivative `d/dx` (multiplier `ik`, Nyquist zeroed).
pub fn spectral_derivative(f: &Field) -> Field {
    apply_multiplier(f, |k| Complex64::new(0.0, k), true)
}

/// Momentum map `m = (1 - d^2/dx^2) u` (multiplier `1 + k^2`).
pub fn helmholtz_apply(f: &Field) -> Field {
    apply_multiplier(f, |k| Complex64::new(1.0 + k * k, 0.0), false)
}

/// Velocity map `u = (1 - d^2/dx^2)^{-1} m`, i.e. convolution with the
/// kernel `p(x) = e^{-|x|}/2` (multiplier `1/(1 + k^2)`).
pub fn helmholtz_inverse(f: &Field) -> Field {
    apply_multiplier(f, |k| Complex64::new(1.0 / (1.0 + k * k), 0.0), false)
}

/// `d/dx (p * f)`, the convolution with `p'(x) = -sign(x) e^{-|x|}/2`
/// (multiplier `ik/(1 + k^2)`, Nyquist zeroed).
pub fn peakon_kernel_deriv_convolve(f: &Field) -> Field {
    apply_multiplier(f, |k| Complex64::new(0.0, k / (1.0 + k * k)), true)
}
