//! Run configuration: flat key = value TOML, overridable by flags. All
//! physical defaults live here, not in the library.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use torusflux::flow::FlowParams;
use torusflux::generator::{DeltaReading, Params};
use torusflux::grid::{GridSpec, TimeGrid, TorusDim};
use torusflux::hodge::HodgeParams;
use torusflux::interp::InterpMethod;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// half-dimension n of T^{2n}
    pub n: usize,
    pub grid_size: usize,
    pub time_steps: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub interp: InterpMethod,
    pub substeps: usize,
    pub delta_reading: DeltaReading,
    pub closedness_tol: f64,
    pub symplectic_tol: f64,
    pub inverse_tol: f64,
    pub inverse_max_iters: usize,
    pub inverse_damping: f64,
    /// d_{C⁰} gate for time-one matching in norm searches
    pub endpoint_tol: f64,
    pub flux_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1,
            grid_size: 64,
            time_steps: 200,
            seed: 42,
            out_dir: PathBuf::from("out"),
            interp: InterpMethod::Linear,
            substeps: 1,
            delta_reading: DeltaReading::OuterFixed,
            closedness_tol: 1e-6,
            symplectic_tol: 0.05,
            inverse_tol: 1e-10,
            inverse_max_iters: 100,
            inverse_damping: 1.0,
            endpoint_tol: 1e-3,
            flux_tol: 1e-6,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Self::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&mut self) -> Result<()> {
        if self.n == 0 {
            bail!("n must be ≥ 1");
        }
        if self.grid_size < 2 {
            bail!("grid_size must be ≥ 2");
        }
        if self.time_steps < 2 {
            bail!("time_steps must be ≥ 2");
        }
        for (name, v) in [
            ("closedness_tol", self.closedness_tol),
            ("symplectic_tol", self.symplectic_tol),
            ("inverse_tol", self.inverse_tol),
            ("endpoint_tol", self.endpoint_tol),
            ("flux_tol", self.flux_tol),
            ("inverse_damping", self.inverse_damping),
        ] {
            #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
            if !(v > 0.0) {
                bail!("{name} must be > 0");
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(TorusDim::new(self.n)?, self.grid_size)?)
    }

    pub fn times(&self) -> Result<TimeGrid> {
        Ok(TimeGrid::unit(self.time_steps)?)
    }

    pub fn params(&self) -> Params {
        Params {
            flow: FlowParams {
                interp: self.interp,
                substeps: self.substeps,
                inverse_tol: self.inverse_tol,
                inverse_max_iters: self.inverse_max_iters,
                inverse_damping: self.inverse_damping,
            },
            hodge: HodgeParams {
                closedness_tol: self.closedness_tol,
                symplectic_tol: self.symplectic_tol,
            },
            delta: self.delta_reading,
        }
    }
}
