//! Numerical laboratory for the generalized Camassa-Holm (gCH) equation
//!
//! ```text
//! m_t = (k1/2) ((u^2 - u_x^2) m)_x + (k2/2) (u m_x + 2 m u_x),   m = u - u_xx,
//! ```
//!
//! a shallow-water model with both quadratic and cubic nonlinearity. For
//! `(k1, k2) = (0, -2)` it reduces to the Camassa-Holm equation, for
//! `(k1, k2) = (-2, 0)` to the modified (cubic) Camassa-Holm equation.
//!
//! The crate evolves the equation pseudo-spectrally on a periodic domain and
//! provides the analytic machinery needed to check the computation against
//! the structure of the equation itself:
//!
//! - [`grid`] — periodic collocation grid, FFT transform conventions,
//!   spectral derivative and the Helmholtz pair `u <-> m = u - u_xx`;
//! - [`equation`] — the right-hand side in three equivalent forms
//!   (conservative, transport, nonlocal/velocity), with dealiased products;
//! - [`evolve`] — RK4 method-of-lines integration with adaptive CFL
//!   stepping, plus the Friedrichs frozen-coefficient iteration scheme;
//! - [`invariants`] — the Hamiltonians H1, H2, the momentum energy
//!   identities, and the wave-breaking monitor `inf u_x`, `inf (m u_x)`;
//! - [`peakon`] — exact peaked traveling waves `C1 e^{-|x-ct|}`, the
//!   coefficient equation, closed-form kernel convolutions, and a
//!   weak-solution residual verifier over a family of bump test functions;
//! - [`littlewood_paley`] — dyadic frequency blocks, low-frequency cutoffs,
//!   Besov and Sobolev norms on grid fields;
//! - [`quadrature`] — panel Gauss-Legendre rules used by the weak-form
//!   machinery;
//! - [`config`] / [`runner`] — TOML run configuration, CSV/JSON persistence
//!   and the command layer behind the `gch` binary.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example simulate_ch_peakon      # evolve a mollified CH peakon
//! cargo run --example peakon_weak_verification # certify peakons as weak solutions
//! cargo run --example equation_forms          # agreement of the three RHS forms
//! cargo run --example conservation            # H1/H2 drift along a smooth run
//! cargo run --example besov_toolkit           # dyadic blocks and Besov norms
//! cargo run --example friedrichs_cascade      # contraction of the iteration scheme
//! cargo run --example wave_breaking           # slope blow-up monitoring
//! ```
//!
//! The same functionality is scriptable through the thin `gch` binary
//! (`simulate`, `peakon-verify`, `besov`, `friedrichs`, `blowup-scan`).

pub mod config;
pub mod equation;
pub mod evolve;
pub mod grid;
pub mod invariants;
pub mod littlewood_paley;
pub mod peakon;
pub mod quadrature;
pub mod runner;

pub use equation::GchParams;
pub use grid::{Field, Grid};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Grid construction rejected (odd/too-small node count, bad length).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    /// Field values do not match the grid or are not finite.
    #[error("invalid field: {0}")]
    InvalidField(String),
    /// A time-integration stage produced a non-finite value.
    #[error("non-finite value produced at t = {t}")]
    NonFinite { t: f64 },
    /// Run configuration failed validation; the message names the key.
    #[error("config error: {0}")]
    Config(String),
    /// The step budget was exhausted before reaching `t_end`.
    #[error("step limit of {0} exceeded before t_end")]
    StepLimit(usize),
    /// `k1 = k2 = 0` admits no peakon family.
    #[error("degenerate parameters: k1 = k2 = 0 admits no peakon")]
    DegenerateParams,
    /// Operation defined only for real-coefficient peakons.
    #[error("complex peakon (discriminant {discriminant}) unsupported here")]
    ComplexPeakonUnsupported { discriminant: f64 },
    /// Dyadic block index beyond what the grid resolves.
    #[error("block q = {q} out of range (q_max = {q_max})")]
    BlockOutOfRange { q: i32, q_max: i32 },
    /// A Friedrichs iterate left the stability envelope.
    #[error("iterate {index} diverged (sup-norm ratio {ratio:.3e})")]
    IterateDiverged { index: usize, ratio: f64 },
    /// Index outside a trajectory's interior records.
    #[error("index {index} outside valid range {valid}")]
    IndexError { index: usize, valid: String },
    /// Besov index outside `p, r >= 1`.
    #[error("invalid Besov index: {0}")]
    InvalidBesovIndex(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
