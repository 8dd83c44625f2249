//! Run configuration: a small TOML schema with sections `[grid]`, `[params]`,
//! `[time]`, `[ic]`, `[output]`, plus optional `[[sweep]]` entries and a
//! `[scan]` section for the blow-up amplitude scan.
//!
//! ```toml
//! [grid]
//! n_points = 4096
//! length = 40.0
//!
//! [params]
//! k1 = 0.0
//! k2 = -2.0
//!
//! [time]
//! t_end = 5.0
//! record_every = 20
//!
//! [ic]
//! kind = "peakon"    # zero | gaussian | peakon | modes | file
//! c = 1.0
//! ```
//!
//! Unknown or missing keys fail validation with the key named in the error.

use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

use crate::equation::GchParams;
use crate::evolve::SimConfig;
use crate::grid::{Field, Grid};
use crate::peakon;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub params: ParamsSection,
    pub time: TimeSection,
    pub ic: IcSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: Vec<SweepEntry>,
    #[serde(default)]
    pub scan: Option<ScanSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_points: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub k1: f64,
    pub k2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_end: f64,
    #[serde(default = "default_dt_init")]
    pub dt_init: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default = "default_true")]
    pub dealias: bool,
}

fn default_dt_init() -> f64 {
    0.01
}
fn default_cfl() -> f64 {
    0.3
}
fn default_dt_min() -> f64 {
    1e-9
}
fn default_record_every() -> usize {
    1
}
fn default_true() -> bool {
    true
}

/// Initial condition description. `kind` selects the branch; the other keys
/// are read per kind and rejected when they make no sense for it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcSection {
    pub kind: String,
    /// peakon: wave speed.
    pub c: Option<f64>,
    /// peakon: mollifier width in units of dx (default 2).
    pub mollify_sigma_dx: Option<f64>,
    /// peakon: which quadratic root, "plus" (default) or "minus".
    pub branch: Option<String>,
    /// gaussian: height (default 0.5), width (default 1), center (default 0).
    pub amplitude: Option<f64>,
    pub sigma: Option<f64>,
    pub center: Option<f64>,
    /// modes: `[[index, amplitude], ..]` cosine modes.
    pub modes: Option<Vec<[f64; 2]>>,
    /// file: CSV with header `x,u`.
    pub path: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    /// Number of snapshot CSVs spread across the recorded trajectory.
    pub snapshots: Option<usize>,
}

/// One parameter-sweep entry; overrides `k1`, `k2` and (for peakon initial
/// data) the speed `c`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub k1: f64,
    pub k2: f64,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub amplitudes: Vec<f64>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    1e3
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.sim_config()?.validate()?;
        match self.ic.kind.as_str() {
            "zero" | "gaussian" | "modes" => {}
            "peakon" => {
                if self.ic.c.is_none() {
                    return Err(Error::Config("ic.c is required for kind = \"peakon\"".into()));
                }
            }
            "file" => {
                if self.ic.path.is_none() {
                    return Err(Error::Config("ic.path is required for kind = \"file\"".into()));
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "ic.kind must be one of zero|gaussian|peakon|modes|file, got \"{other}\""
                )));
            }
        }
        if let Some(scan) = &self.scan {
            if scan.amplitudes.is_empty() {
                return Err(Error::Config("scan.amplitudes must be non-empty".into()));
            }
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<Arc<Grid>> {
        Grid::new(self.grid.n_points, self.grid.length)
            .map_err(|e| Error::Config(format!("grid: {e}")))
    }

    pub fn gch_params(&self) -> GchParams {
        GchParams::new(self.params.k1, self.params.k2)
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let mut sim = SimConfig::new(self.gch_params(), self.time.t_end);
        sim.dt_init = self.time.dt_init;
        sim.cfl = self.time.cfl;
        sim.dt_min = self.time.dt_min;
        sim.record_every = self.time.record_every;
        sim.dealias = self.time.dealias;
        Ok(sim)
    }

    /// Build the configured initial condition on `grid`. `config_dir` anchors
    /// relative `ic.path` references.
    pub fn build_initial_condition(&self, grid: &Arc<Grid>, config_dir: &Path) -> Result<Field> {
        match self.ic.kind.as_str() {
            "zero" => Ok(Field::zeros(grid)),
            "gaussian" => {
                let a = self.ic.amplitude.unwrap_or(0.5);
                let s = self.ic.sigma.unwrap_or(1.0);
                let x0 = self.ic.center.unwrap_or(0.0);
                if s.is_nan() || s <= 0.0 {
                    return Err(Error::Config(format!("ic.sigma must be > 0, got {s}")));
                }
                Ok(Field::from_fn(grid, |x| a * (-(x - x0) * (x - x0) / (2.0 * s * s)).exp()))
            }
            "peakon" => {
                if grid.length() < 20.0 {
                    return Err(Error::Config(format!(
                        "grid.length must be >= 20 for peakon initial data \
                         (truncated image sum), got {}",
                        grid.length()
                    )));
                }
                let c = self.ic.c.expect("validated");
                let spec = self.select_peakon_root(c)?;
                let sigma_dx = self.ic.mollify_sigma_dx.unwrap_or(2.0);
                if sigma_dx < 0.0 {
                    return Err(Error::Config("ic.mollify_sigma_dx must be >= 0".into()));
                }
                peakon::periodized_peakon(&spec, grid, sigma_dx * grid.spacing())
            }
            "modes" => {
                let modes = self.ic.modes.clone().unwrap_or_default();
                let dk = std::f64::consts::TAU / grid.length();
                Ok(Field::from_fn(grid, move |x| {
                    modes.iter().map(|[j, a]| a * (j * dk * x).cos()).sum()
                }))
            }
            "file" => {
                let rel = self.ic.path.as_ref().expect("validated");
                let path = config_dir.join(rel);
                let stored = crate::runner::read_field_csv(&path)?;
                if !stored.grid().same_layout(grid) {
                    return Err(Error::Config(format!(
                        "ic.path field has {} nodes on length {}, config wants {} on {}",
                        stored.grid().n_points(),
                        stored.grid().length(),
                        grid.n_points(),
                        grid.length()
                    )));
                }
                Field::new(grid, stored.values().to_vec())
            }
            _ => unreachable!("validated"),
        }
    }

    /// Resolve the peakon root for speed `c` honoring `ic.branch`.
    pub fn select_peakon_root(&self, c: f64) -> Result<peakon::PeakonSpec> {
        let roots = peakon::peakon_coefficients(&self.gch_params(), c)?;
        let branch = self.ic.branch.as_deref().unwrap_or("plus");
        let spec = match branch {
            "plus" => roots[0],
            "minus" => *roots.last().expect("at least one root"),
            other => {
                return Err(Error::Config(format!(
                    "ic.branch must be \"plus\" or \"minus\", got \"{other}\""
                )));
            }
        };
        if !spec.is_real {
            return Err(Error::Config(format!(
                "peakon coefficient is complex for (k1, k2, c) = ({}, {}, {c}) \
                 (discriminant {}); no real traveling wave to simulate",
                self.params.k1, self.params.k2, spec.discriminant
            )));
        }
        Ok(spec)
    }

    /// Human-readable tag for the manifest.
    pub fn ic_description(&self) -> String {
        match self.ic.kind.as_str() {
            "peakon" => format!(
                "peakon(c = {}, branch = {}, mollify_sigma_dx = {})",
                self.ic.c.unwrap_or(f64::NAN),
                self.ic.branch.as_deref().unwrap_or("plus"),
                self.ic.mollify_sigma_dx.unwrap_or(2.0)
            ),
            "gaussian" => format!(
                "gaussian(amplitude = {}, sigma = {}, center = {})",
                self.ic.amplitude.unwrap_or(0.5),
                self.ic.sigma.unwrap_or(1.0),
                self.ic.center.unwrap_or(0.0)
            ),
            "modes" => format!("modes({:?})", self.ic.modes.clone().unwrap_or_default()),
            "file" => format!("file({})", self.ic.path.as_deref().unwrap_or("")),
            other => other.to_string(),
        }
    }
}
