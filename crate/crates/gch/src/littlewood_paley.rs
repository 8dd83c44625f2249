//! Numerical Littlewood-Paley decomposition and Besov norms.
//!
//! Dyadic blocks are Fourier multipliers built from a smooth even profile
//! `psi` (equal to 1 on `|xi| <= 3/4`, vanishing for `|xi| >= 4/3`) and the
//! annulus profile `phi(xi) = psi(xi/2) - psi(xi)`, supported in
//! `3/4 <= |xi| <= 8/3`. The telescoping construction makes the partition of
//! unity `psi(xi) + sum_q phi(2^{-q} xi) = 1` and the cutoff identity
//! `S_q = psi(2^{-q} D)` hold exactly (up to floating point), not just up to
//! equivalence:
//!
//! - block `-1`: `psi(D) u`; block `q >= 0`: `phi(2^{-q} D) u`;
//! - low cutoff: `S_q u = sum_{i<q} Delta_i u = psi(2^{-q} D) u`;
//! - Besov norm: `||u||_{B^s_{p,r}} = ( sum_q 2^{qsr} ||Delta_q u||_{L^p}^r )^{1/r}`.
//!
//! Profile shapes are a construction choice, so all Besov values here are
//! construction-dependent; construction-independent statements
//! (reconstruction, support disjointness, norm equivalence with `H^s`) are
//! what the tests pin down.

use crate::grid::Field;
use crate::{Error, Result};
use num_complex::Complex64;

/// Smooth transition `T`: 0 for `t <= 0`, 1 for `t >= 1`, C-infinity.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// The dyadic multiplier profiles together with the largest block index the
/// grid resolves.
#[derive(Debug, Clone, Copy)]
pub struct DyadicPartition {
    q_max: i32,
}

impl DyadicPartition {
    /// Partition for a grid: `q_max = floor(log2 k_nyquist) - 2`, so the top
    /// block's annulus `2^q [3/4, 8/3]` stays inside the resolved band.
    pub fn for_grid(grid: &crate::grid::Grid) -> DyadicPartition {
        let k_nyq = grid.wavenumbers()[grid.nyquist_index()].abs();
        let q_max = (k_nyq.log2().floor() as i32 - 2).max(-1);
        DyadicPartition { q_max }
    }

    /// Partition with an explicit top block (mostly for tests).
    pub fn with_q_max(q_max: i32) -> DyadicPartition {
        DyadicPartition { q_max: q_max.max(-1) }
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Low-frequency profile: 1 on `|xi| <= 3/4`, 0 for `|xi| >= 4/3`.
    pub fn psi(&self, xi: f64) -> f64 {
        let a = xi.abs();
        smooth_step((4.0 / 3.0 - a) / (4.0 / 3.0 - 3.0 / 4.0))
    }

    /// Annulus profile `phi(xi) = psi(xi/2) - psi(xi)`, supported in
    /// `3/4 <= |xi| <= 8/3`.
    pub fn phi(&self, xi: f64) -> f64 {
        self.psi(0.5 * xi) - self.psi(xi)
    }

    /// Multiplier of block `q` at wavenumber `xi`.
    pub fn block_symbol(&self, q: i32, xi: f64) -> f64 {
        if q == -1 {
            self.psi(xi)
        } else {
            self.phi(xi / 2f64.powi(q))
        }
    }

    /// `|psi(xi) + sum_{q=0}^{Q} phi(2^{-q} xi) - 1|` with `Q` taken large
    /// enough that the tail is identically zero at this `xi`. This is the
    /// partition-of-unity defect of the profile construction itself.
    pub fn partition_residual(&self, xi: f64) -> f64 {
        let needed = (xi.abs().max(1.0) / 0.75).log2().ceil() as i32 + 1;
        let mut sum = self.psi(xi);
        for q in 0..=needed.max(0) {
            sum += self.phi(xi / 2f64.powi(q));
        }
        (sum - 1.0).abs()
    }

    /// Largest wavenumber at which the truncated block family `-1..=q_max`
    /// still sums to one; reconstruction from blocks is exact only for
    /// spectra inside this band.
    pub fn coverage(&self) -> f64 {
        0.75 * 2f64.powi(self.q_max + 1)
    }
}

/// Indices `(s, p, r)` of a Besov norm; `p` and `r` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Result<BesovIndex> {
        if p.is_nan() || p < 1.0 || r.is_nan() || r < 1.0 || !s.is_finite() {
            return Err(Error::InvalidBesovIndex(format!("(s, p, r) = ({s}, {p}, {r})")));
        }
        Ok(BesovIndex { s, p, r })
    }
}

fn apply_symbol(u: &Field, sym: impl Fn(f64) -> f64) -> Field {
    let grid = u.grid();
    let mut spec = u.spectrum();
    for (c, &k) in spec.iter_mut().zip(grid.wavenumbers()) {
        *c *= Complex64::new(sym(k), 0.0);
    }
    Field::unchecked(grid, grid.inverse(&spec))
}

/// Dyadic block `Delta_q u` (`q = -1` is the low block).
pub fn lp_block(u: &Field, q: i32, part: &DyadicPartition) -> Result<Field> {
    if q < -1 || q > part.q_max() {
        return Err(Error::BlockOutOfRange { q, q_max: part.q_max() });
    }
    Ok(apply_symbol(u, |k| part.block_symbol(q, k)))
}

/// Low-frequency cutoff `S_q u = psi(2^{-q} D) u`, `0 <= q <= q_max + 1`.
pub fn low_cutoff(u: &Field, q: i32, part: &DyadicPartition) -> Result<Field> {
    if q < 0 || q > part.q_max() + 1 {
        return Err(Error::BlockOutOfRange { q, q_max: part.q_max() });
    }
    Ok(apply_symbol(u, |k| part.psi(k / 2f64.powi(q))))
}

/// Like [`low_cutoff`] but clamps `q` to the resolvable range; beyond
/// `q_max + 1` the cutoff is the identity on the covered band anyway.
pub(crate) fn low_cutoff_clamped(u: &Field, q: i32, part: &DyadicPartition) -> Field {
    let q = q.clamp(0, part.q_max() + 1);
    low_cutoff(u, q, part).expect("clamped q is in range")
}

/// Grid `L^p` norm with the trapezoid measure `dx`.
fn lp_norm(values: &[f64], dx: f64, p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0_f64, |a, &v| a.max(v.abs()))
    } else if p == 2.0 {
        (values.iter().map(|v| v * v).sum::<f64>() * dx).sqrt()
    } else {
        (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * dx).powf(1.0 / p)
    }
}

/// Discrete Besov norm over blocks `q = -1 ..= q_max`.
pub fn besov_norm(u: &Field, idx: &BesovIndex, part: &DyadicPartition) -> f64 {
    let dx = u.grid().spacing();
    let weights = (-1..=part.q_max()).map(|q| {
        let block = lp_block(u, q, part).expect("q in range by construction");
        2f64.powf(q as f64 * idx.s) * lp_norm(block.values(), dx, idx.p)
    });
    if idx.r.is_infinite() {
        weights.fold(0.0_f64, f64::max)
    } else {
        weights.map(|w| w.powf(idx.r)).sum::<f64>().powf(1.0 / idx.r)
    }
}

/// Per-block `2^{qs} ||Delta_q u||_{L^p}` weights, for block-spectrum CSVs.
pub fn block_weights(u: &Field, idx: &BesovIndex, part: &DyadicPartition) -> Vec<(i32, f64)> {
    let dx = u.grid().spacing();
    (-1..=part.q_max())
        .map(|q| {
            let block = lp_block(u, q, part).expect("q in range by construction");
            (q, 2f64.powf(q as f64 * idx.s) * lp_norm(block.values(), dx, idx.p))
        })
        .collect()
}

/// Sobolev norm `( L sum_k (1 + k^2)^s |c_k|^2 )^{1/2}`; with the forward
/// transform divided by `n` this reproduces the continuum `L^2` measure, so
/// for example `||cos||_{H^1} = sqrt(2 pi)` on `L = 2 pi`.
pub fn sobolev_norm(u: &Field, s: f64) -> f64 {
    let grid = u.grid();
    let spec = u.spectrum();
    let sum: f64 = spec
        .iter()
        .zip(grid.wavenumbers())
        .map(|(c, &k)| (1.0 + k * k).powf(s) * c.norm_sqr())
        .sum();
    (grid.length() * sum).sqrt()
}
