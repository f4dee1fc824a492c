//! Scenario builders: rotation flows, reparametrized rotations, conjugated
//! one-parameter families, and the strip displacement scenario.
//!
//! A translation x ↦ x + v of R^{2n} induces the rotation R_v of T^{2n};
//! the path t ↦ R_{tv} is harmonic with generator (0, Σ a_i dθ_{i+n} −
//! b_i dθ_i) for v = (a, b). The reparametrization f_j(t) = (j/(1+j))·t
//! scales the harmonic family by j/(1+j). Conjugating by a Hamiltonian
//! time-one map keeps the harmonic part and adds the Hamiltonian part
//! μ^t = ∫₀¹ η^t(Φ̇(s)) ∘ Φ(s) ds, normalized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{HarmonicForm, ScalarField, VectorFieldGrid};
use crate::flow::{self, Isotopy};
use crate::generator::{self, Generator, Params};
use crate::grid::{GridSpec, TimeGrid};
use crate::hofer::{self, DisplacementOutcome, EnergyCertificate, LengthVersion, Region};
use crate::symplectic;

/// A rotation flow: direction v ∈ R^{2n}, optionally reparametrized by
/// f_j(t) = (j/(1+j))·t.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationSpec {
    pub v: Vec<f64>,
    pub reparam_j: Option<u32>,
}

impl RotationSpec {
    pub fn new(v: Vec<f64>) -> Self {
        Self { v, reparam_j: None }
    }

    pub fn with_reparam(mut self, j: u32) -> Self {
        self.reparam_j = Some(j);
        self
    }

    /// The speed factor j/(1+j), or 1 for the plain rotation.
    pub fn speed(&self) -> f64 {
        match self.reparam_j {
            Some(j) => j as f64 / (1.0 + j as f64),
            None => 1.0,
        }
    }
}

/// Generator (0, c_j · Σ a_i dθ_{i+n} − b_i dθ_i) of the (reparametrized)
/// rotation path.
pub fn build_rotation(spec: &RotationSpec, grid: GridSpec, times: TimeGrid) -> Result<Generator> {
    if spec.v.len() != grid.dim().ambient() {
        return Err(Error::DimensionMismatch(format!(
            "rotation vector has {} entries in dimension {}",
            spec.v.len(),
            grid.dim().ambient()
        )));
    }
    let h = symplectic::flat_constant(&spec.v)?.scale(spec.speed());
    Generator::harmonic(grid, times, |_| h.clone())
}

/// The conjugated family Ψ: t ↦ φ^{-1} ∘ R^t ∘ φ for a Hamiltonian
/// conjugator with time-one map φ, together with its generator (μ, η).
/// The harmonic part of the generator is the rotation form unchanged;
/// μ is computed by quadrature over the conjugating isotopy and normalized.
pub fn build_conjugated(
    spec: &RotationSpec,
    conj: &Generator,
    params: &Params,
) -> Result<(Generator, Isotopy)> {
    let harm_norm = conj.max_harmonic_norm();
    if harm_norm > 1e-9 {
        return Err(Error::NotHamiltonianConjugator(harm_norm));
    }
    let grid = *conj.grid();
    let times = *conj.times();
    let d = grid.dim().ambient();
    if spec.v.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "rotation vector has {} entries in dimension {}",
            spec.v.len(),
            d
        )));
    }

    let eta = symplectic::flat_constant(&spec.v)?.scale(spec.speed());
    let conj_path = flow::integrate(conj, &params.flow)?;
    let phi_disp = &conj_path.maps()[times.samples() - 1];
    let phi_inv = conj_path.inverse_slice(times.samples() - 1, &params.flow)?;

    // μ = ∫₀¹ η(Φ̇(s)) ∘ Φ(s) ds: the full-interval trajectory integral of
    // the conjugating isotopy contracted with the constant form η.
    let eta_family: Vec<HarmonicForm> = (0..times.samples()).map(|_| eta.clone()).collect();
    let raw = generator::delta_unnormalized(&eta_family, &conj_path, params.delta, &params.flow)?;
    let mu = raw[times.samples() - 1].normalized();

    let hams: Vec<ScalarField> = (0..times.samples()).map(|_| mu.clone()).collect();
    let harms: Vec<HarmonicForm> = (0..times.samples()).map(|_| eta.clone()).collect();
    let gen = Generator::new(grid, times, hams, harms)?;

    // the path φ^{-1} ∘ R^t ∘ φ assembled slice by slice; the t = 0 slice
    // φ^{-1} ∘ φ carries the composition error of the grid inverse, so it is
    // subtracted from every slice to anchor the lift at the identity
    let speed = spec.speed();
    let composite = |t: f64| -> Result<VectorFieldGrid> {
        let shift: Vec<f64> = spec.v.iter().map(|c| c * speed * t).collect();
        let rotated = phi_disp.add(&VectorFieldGrid::constant(grid, &shift)?)?;
        let outer = flow::compose_field(phi_inv.displacement(), &rotated, params.flow.interp);
        rotated.add(&outer)
    };
    let anchor = composite(0.0)?;
    let maps: Vec<VectorFieldGrid> = (0..times.samples())
        .map(|k| composite(times.time(k))?.sub(&anchor))
        .collect::<Result<_>>()?;
    let path = Isotopy::from_displacements(grid, times, maps, &params.flow)?;

    Ok((gen, path))
}

/// Everything the strip experiment produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StripScenario {
    pub nu: f64,
    pub a1: f64,
    pub conjugated: bool,
    pub warnings: Vec<String>,
    pub displacement: DisplacementOutcome,
    pub energy: Option<EnergyCertificate>,
}

/// The strip experiment: the region C(ν), the (optionally conjugated)
/// rotation by (a_1, 0), a displacement test and an energy upper bound over
/// the rotation family. Parameters outside the ranges ν < 1/4,
/// a_1 ∈ (0, 1/2] draw warnings, not errors.
pub fn build_strip_scenario(
    nu: f64,
    a1: f64,
    conj: Option<&Generator>,
    grid: GridSpec,
    times: TimeGrid,
    params: &Params,
) -> Result<StripScenario> {
    let mut warnings = Vec::new();
    if !(nu > 0.0 && nu < 0.25) {
        warnings.push(format!("ν = {nu} is outside the stated range (0, 1/4)"));
    }
    if !(a1 > 0.0 && a1 <= 0.5) {
        warnings.push(format!("a1 = {a1} is outside the stated range (0, 1/2]"));
    }
    let region = Region::Strip { nu };
    region.validate(&grid)?;

    let d = grid.dim().ambient();
    let mut v = vec![0.0; d];
    v[0] = a1;
    let spec = RotationSpec::new(v);

    let map = match conj {
        Some(c) => {
            let (_, path) = build_conjugated(&spec, c, params)?;
            path.time_one()
        }
        None => {
            let gen = build_rotation(&spec, grid, times)?;
            flow::integrate(&gen, &params.flow)?.time_one()
        }
    };
    let displacement = hofer::displacement_test(&map, &region)?;

    // energy bound over the θ1-rotation family on a fine magnitude grid
    let mags: Vec<f64> = (1..=128).map(|k| k as f64 / 256.0).collect();
    let family = hofer::rotation_family(grid, times, &mags)?;
    let energy = match hofer::displacement_energy_upper(&region, &family, LengthVersion::Linf, params)
    {
        Ok(cert) => Some(cert),
        Err(Error::NoDisplacer) => None,
        Err(e) => return Err(e),
    };

    Ok(StripScenario {
        nu,
        a1,
        conjugated: conj.is_some(),
        warnings,
        displacement,
        energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusDim;
    use std::f64::consts::TAU;

    fn grid(pts: usize) -> GridSpec {
        GridSpec::new(TorusDim::new(1).unwrap(), pts).unwrap()
    }

    #[test]
    fn zero_vector_gives_zero_generator() {
        let g = grid(8);
        let t = TimeGrid::unit(10).unwrap();
        let gen = build_rotation(&RotationSpec::new(vec![0.0, 0.0]), g, t).unwrap();
        assert_eq!(generator::linf_family_norm(&gen), 0.0);
    }

    #[test]
    fn rotation_generator_matches_the_flat_form() {
        let g = grid(8);
        let t = TimeGrid::unit(10).unwrap();
        let gen = build_rotation(&RotationSpec::new(vec![0.3, 0.4]), g, t).unwrap();
        // (0, a dθ2 − b dθ1) with (a, b) = (0.3, 0.4)
        assert!(gen.ham(0).sup_norm() == 0.0);
        let h = gen.harm(0);
        assert!((h.coeff(0) + 0.4).abs() < 1e-15);
        assert!((h.coeff(1) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn reparametrized_length_arithmetic() {
        let g = grid(8);
        let t = TimeGrid::unit(10).unwrap();
        let gen = build_rotation(&RotationSpec::new(vec![0.3, 0.4]).with_reparam(2), g, t).unwrap();
        let l = crate::hofer::length_linf(&gen);
        assert!((l - 2.0 / 3.0 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn minus_v_matches_group_inverse() {
        let p = Params::default();
        let g = grid(16);
        let t = TimeGrid::unit(40).unwrap();
        let a = build_rotation(&RotationSpec::new(vec![0.3, -0.2]), g, t).unwrap();
        let b = build_rotation(&RotationSpec::new(vec![-0.3, 0.2]), g, t).unwrap();
        let inv = generator::group_inverse(&a, &p).unwrap();
        assert!(generator::linf_family_distance(&inv, &b).unwrap() < 1e-10);
    }

    #[test]
    fn conjugation_by_zero_returns_the_plain_rotation() {
        let p = Params::default();
        let g = grid(16);
        let t = TimeGrid::unit(30).unwrap();
        let conj = Generator::zero(g, t);
        let spec = RotationSpec::new(vec![0.25, 0.1]);
        let (gen, path) = build_conjugated(&spec, &conj, &p).unwrap();
        assert!(gen.ham(0).sup_norm() < 1e-13);
        let plain = flow::integrate(&build_rotation(&spec, g, t).unwrap(), &p.flow).unwrap();
        let gap = flow::path_distance(&path, &plain, &p.flow).unwrap().dbar;
        assert!(gap < 1e-12);
    }

    #[test]
    fn conjugated_path_properties() {
        let p = Params {
            flow: crate::flow::FlowParams {
                interp: crate::interp::InterpMethod::Cubic,
                ..Default::default()
            },
            ..Params::default()
        };
        let g = grid(32);
        let t = TimeGrid::unit(60).unwrap();
        let u = ScalarField::from_fn(g, |c| 0.01 * (TAU * c[0]).sin() * (TAU * c[1]).cos());
        let conj = Generator::hamiltonian(g, t, |_, _| u.clone()).unwrap();
        let spec = RotationSpec::new(vec![0.3, 0.15]);
        let (gen, path) = build_conjugated(&spec, &conj, &p).unwrap();

        // flux of the conjugated generator is [η]
        let eta = symplectic::flat_constant(&spec.v).unwrap();
        assert!(crate::flux::flux(&gen).harmonic_rep.sub(&eta).norm() < 1e-12);
        // Hamiltonian part is normalized at every t
        for k in [0, 30, 60] {
            assert!(gen.ham(k).mean().abs() < 1e-12);
        }

        // time-one map equals φ^{-1} ∘ R_v ∘ φ within d_C0 tolerance:
        // rebuild by explicit composition
        let conj_path = flow::integrate(&conj, &p.flow).unwrap();
        let rot = flow::integrate(&build_rotation(&spec, g, t).unwrap(), &p.flow).unwrap();
        let inv_last = conj_path
            .inverse_slice(t.samples() - 1, &p.flow)
            .unwrap();
        let composed = flow::compose_displacements(
            &flow::compose_displacements(
                inv_last.displacement(),
                rot.maps().last().unwrap(),
                p.flow.interp,
            ),
            conj_path.maps().last().unwrap(),
            p.flow.interp,
        );
        // both sides are interpolated assemblies of the same map, so the gap
        // measures interpolation error; an order or sign bug would be O(|v|)
        let gap = path
            .time_one()
            .c0_distance(&crate::flow::TorusMap::new(composed))
            .unwrap();
        assert!(gap < 1e-4, "time-one mismatch {gap}");

        // the generator actually generates the path
        let integrated = flow::integrate(&gen, &p.flow).unwrap();
        let dist = flow::path_distance(&integrated, &path, &p.flow).unwrap().dbar;
        assert!(dist < 2e-3, "generator/path mismatch {dist}");
    }

    #[test]
    fn conjugator_with_harmonic_part_is_rejected() {
        let p = Params::default();
        let g = grid(8);
        let t = TimeGrid::unit(10).unwrap();
        let bad = Generator::harmonic(g, t, |_| HarmonicForm::new(vec![0.1, 0.0])).unwrap();
        let err = build_conjugated(&RotationSpec::new(vec![0.1, 0.0]), &bad, &p).unwrap_err();
        assert!(matches!(err, Error::NotHamiltonianConjugator(_)));
    }

    #[test]
    fn strip_scenario_booleans() {
        let p = Params::default();
        let g = grid(64);
        let t = TimeGrid::unit(20).unwrap();
        let yes = build_strip_scenario(0.2, 0.3, None, g, t, &p).unwrap();
        assert!(yes.displacement.displaced);
        assert!(yes.warnings.is_empty());
        let no = build_strip_scenario(0.2, 0.1, None, g, t, &p).unwrap();
        assert!(!no.displacement.displaced);
        // energy chain: 0 < bound < ∞
        let cert = yes.energy.unwrap();
        assert!(cert.bound > 0.0 && cert.bound.is_finite());
        // out-of-range parameters warn but do not fail
        let warned = build_strip_scenario(0.3, 0.6, None, g, t, &p).unwrap();
        assert_eq!(warned.warnings.len(), 2);
    }
}
