//! Generator and isotopy inputs: either a saved field container (a `.json`
//! manifest next to a `.bin` payload) or a small builder spec in JSON.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use torusflux::field::HarmonicForm;
use torusflux::flow::Isotopy;
use torusflux::generator::Generator;
use torusflux::io;
use torusflux::sampling;
use torusflux::scenarios::{build_rotation, RotationSpec};

/// A buildable generator description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// the zero generator
    Zero,
    /// rotation by v, optionally reparametrized by j/(1+j)
    Rotation { v: Vec<f64>, j: Option<u32> },
    /// harmonic family coeffs · sin(2π t) (flux-zero wave)
    HarmonicWave { coeffs: Vec<f64> },
    /// autonomous harmonic generator with the given coefficients
    Harmonic { coeffs: Vec<f64> },
    /// seeded random band-limited generator
    Random {
        seed: u64,
        max_mode: i32,
        amp_ham: f64,
        amp_harm: f64,
    },
    /// seeded random Hamiltonian generator
    RandomHamiltonian { seed: u64, max_mode: i32, amp: f64 },
}

impl GeneratorSpec {
    pub fn build(&self, cfg: &RunConfig) -> Result<Generator> {
        let grid = cfg.grid()?;
        let times = cfg.times()?;
        Ok(match self {
            GeneratorSpec::Zero => Generator::zero(grid, times),
            GeneratorSpec::Rotation { v, j } => {
                let mut spec = RotationSpec::new(v.clone());
                if let Some(j) = j {
                    spec = spec.with_reparam(*j);
                }
                build_rotation(&spec, grid, times)?
            }
            GeneratorSpec::HarmonicWave { coeffs } => {
                let base = HarmonicForm::new(coeffs.clone());
                Generator::harmonic(grid, times, |t| {
                    base.scale((std::f64::consts::TAU * t).sin())
                })?
            }
            GeneratorSpec::Harmonic { coeffs } => {
                let base = HarmonicForm::new(coeffs.clone());
                Generator::harmonic(grid, times, |_| base.clone())?
            }
            GeneratorSpec::Random {
                seed,
                max_mode,
                amp_ham,
                amp_harm,
            } => {
                let mut rng = sampling::rng(*seed);
                sampling::random_generator(grid, times, *max_mode, *amp_ham, *amp_harm, &mut rng)?
            }
            GeneratorSpec::RandomHamiltonian {
                seed,
                max_mode,
                amp,
            } => {
                let mut rng = sampling::rng(*seed);
                sampling::random_hamiltonian_generator(grid, times, *max_mode, *amp, &mut rng)?
            }
        })
    }
}

/// Load a generator: builder-spec JSON or a saved container manifest.
pub fn load_generator(path: &Path, cfg: &RunConfig) -> Result<Generator> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading generator {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    match value.get("kind").and_then(|k| k.as_str()) {
        Some("generator") => {
            let base = path.with_extension("");
            Ok(io::load_generator(&base)?)
        }
        Some(_) => {
            let spec: GeneratorSpec = serde_json::from_value(value)
                .with_context(|| format!("parsing generator spec {}", path.display()))?;
            spec.build(cfg)
        }
        None => bail!(
            "{} is neither a generator manifest nor a builder spec (missing \"kind\")",
            path.display()
        ),
    }
}

pub fn load_isotopy(path: &Path, cfg: &RunConfig) -> Result<Isotopy> {
    let base = path.with_extension("");
    Ok(io::load_isotopy(&base, &cfg.params().flow)?)
}
