//! The generator calculus: pairs (U, H) of a normalized Hamiltonian family
//! and a harmonic family, with the group law
//!
//! ```text
//! (U, H) ⋈ (V, K) = ( U + V∘φ_{(U,H)}^{-1} + Δ̃(K, φ_{(U,H)}^{-1}),  H + K )
//! (U, H)⁻¹        = ( -U∘φ_{(U,H)} − Δ̃(H, φ_{(U,H)}),             -H )
//! ```
//!
//! where Δ̃_t(K, χ) is the normalized integral ∫₀ᵗ K_t(χ̇^s) ∘ χ^s ds. The
//! outer index of K is held at t while s runs — that is the literal reading
//! of the defining formula; the variant with K_s inside the integral is
//! available behind [`DeltaReading::Integrand`] for experiments.
//!
//! The Banyaga norm of a symplectic vector field with Hodge data (U, H) is
//! ‖X^{(U,H)}‖ = |H| + osc(U); families carry the L^∞ norm max_t ‖·‖ and
//! the group carries the D² metric built from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{HarmonicForm, ScalarField, VectorFieldGrid};
use crate::flow::{self, FlowParams, Isotopy};
use crate::grid::{GridSpec, TimeGrid};
use crate::hodge::{self, HodgeParams};
use crate::par;
use crate::symplectic;

/// Which time index of the harmonic family enters the Δ̃ integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaReading {
    /// K_t fixed at the outer time while s runs (the defining formula).
    #[default]
    OuterFixed,
    /// K_s inside the integral.
    Integrand,
}

/// Shared knobs for the generator/flow pipeline.
#[derive(Debug, Clone, Copy, Default)]
pub struct Params {
    pub flow: FlowParams,
    pub hodge: HodgeParams,
    pub delta: DeltaReading,
}

/// Time-sampled generator (U_t, H_t); every U_t is kept zero-mean.
#[derive(Debug, Clone)]
pub struct Generator {
    grid: GridSpec,
    times: TimeGrid,
    hams: Vec<ScalarField>,
    harms: Vec<HarmonicForm>,
}

/// A finite sequence of generators sharing one discretization.
pub type GeneratorSeq = Vec<Generator>;

impl Generator {
    pub fn new(
        grid: GridSpec,
        times: TimeGrid,
        hams: Vec<ScalarField>,
        harms: Vec<HarmonicForm>,
    ) -> Result<Self> {
        if hams.len() != times.samples() || harms.len() != times.samples() {
            return Err(Error::TimeGridMismatch(format!(
                "{} Hamiltonian and {} harmonic samples for {} time samples",
                hams.len(),
                harms.len(),
                times.samples()
            )));
        }
        for h in &hams {
            grid.check_same(h.grid())?;
        }
        for h in &harms {
            if h.ambient() != grid.dim().ambient() {
                return Err(Error::DimensionMismatch(format!(
                    "harmonic form has {} coefficients in dimension {}",
                    h.ambient(),
                    grid.dim().ambient()
                )));
            }
        }
        let hams = hams.into_iter().map(|h| h.normalized()).collect();
        Ok(Self {
            grid,
            times,
            hams,
            harms,
        })
    }

    pub fn zero(grid: GridSpec, times: TimeGrid) -> Self {
        Self {
            grid,
            times,
            hams: (0..times.samples()).map(|_| ScalarField::zeros(grid)).collect(),
            harms: (0..times.samples())
                .map(|_| HarmonicForm::zero(grid.dim().ambient()))
                .collect(),
        }
    }

    /// Hamiltonian generator (U, 0) from a per-time field builder.
    pub fn hamiltonian(
        grid: GridSpec,
        times: TimeGrid,
        u: impl Fn(usize, f64) -> ScalarField,
    ) -> Result<Self> {
        let m = times.samples();
        let hams = (0..m).map(|k| u(k, times.time(k))).collect();
        let harms = (0..m)
            .map(|_| HarmonicForm::zero(grid.dim().ambient()))
            .collect();
        Self::new(grid, times, hams, harms)
    }

    /// Harmonic generator (0, H) from a per-time form builder.
    pub fn harmonic(
        grid: GridSpec,
        times: TimeGrid,
        h: impl Fn(f64) -> HarmonicForm,
    ) -> Result<Self> {
        let m = times.samples();
        let hams = (0..m).map(|_| ScalarField::zeros(grid)).collect();
        let harms = (0..m).map(|k| h(times.time(k))).collect();
        Self::new(grid, times, hams, harms)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn ham(&self, k: usize) -> &ScalarField {
        &self.hams[k]
    }

    pub fn harm(&self, k: usize) -> &HarmonicForm {
        &self.harms[k]
    }

    pub fn hams(&self) -> &[ScalarField] {
        &self.hams
    }

    pub fn harms(&self) -> &[HarmonicForm] {
        &self.harms
    }

    pub fn check_compatible(&self, other: &Generator) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        self.times.check_same(&other.times)
    }

    /// Max over time of the harmonic-part norm; 0 iff Hamiltonian.
    pub fn max_harmonic_norm(&self) -> f64 {
        self.harms.iter().map(|h| h.norm()).fold(0.0, f64::max)
    }

    /// Pointwise scaling of both families.
    pub fn scale(&self, c: f64) -> Generator {
        Generator {
            grid: self.grid,
            times: self.times,
            hams: self.hams.iter().map(|u| u.scale(c)).collect(),
            harms: self.harms.iter().map(|h| h.scale(c)).collect(),
        }
    }
}

/// Banyaga's intrinsic norm ‖X^{(U,H)}‖ = |H| + osc(U).
pub fn vf_norm(u: &ScalarField, h: &HarmonicForm) -> f64 {
    h.norm() + u.osc()
}

/// The L^∞ family norm max_t ‖X^{(U_t,H_t)}‖.
pub fn linf_family_norm(g: &Generator) -> f64 {
    (0..g.times.samples())
        .map(|k| vf_norm(g.ham(k), g.harm(k)))
        .fold(0.0, f64::max)
}

/// max_t ‖X_a(t) − X_b(t)‖; the forward half of D². Exact at the level of
/// Hodge data because the decomposition is linear.
pub fn linf_family_distance(a: &Generator, b: &Generator) -> Result<f64> {
    a.check_compatible(b)?;
    let mut worst = 0.0f64;
    for k in 0..a.times.samples() {
        let du = a.ham(k).sub(b.ham(k))?;
        let dh = a.harm(k).sub(b.harm(k));
        worst = worst.max(vf_norm(&du, &dh));
    }
    Ok(worst)
}

/// Banyaga norm of a numerical symplectic field: Hodge-split ι(Z)ω and take
/// |H| + osc(U).
pub fn field_norm(z: &VectorFieldGrid) -> f64 {
    let split = hodge::decompose_unchecked(&symplectic::flat(z));
    vf_norm(&split.potential, &split.harmonic)
}

/// Per-sample trajectory integrals C_i(t_k, x) = ∫₀^{t_k} χ̇^s_i(χ^s(x)) ds,
/// the building block of every Δ̃-type integral: the integrand of Δ̃ is a
/// constant-coefficient contraction of these component fields.
fn motion_integrals(path: &Isotopy, params: &FlowParams) -> Vec<VectorFieldGrid> {
    let m = path.times().samples();
    let dt = path.times().dt();
    let grid = *path.grid();
    let d = grid.dim().ambient();

    // W(s): velocity interpolated along the trajectories.
    let w: Vec<VectorFieldGrid> = par::map_indexed(m, |k| {
        flow::compose_field(&path.velocities()[k], &path.maps()[k], params.interp)
    });

    // cumulative trapezoid in s, per component
    let mut out: Vec<VectorFieldGrid> = Vec::with_capacity(m);
    out.push(VectorFieldGrid::zeros(grid));
    for k in 1..m {
        let mut comps: Vec<ScalarField> = Vec::with_capacity(d);
        for i in 0..d {
            let prev = out[k - 1].component(i);
            let inc = w[k - 1]
                .component(i)
                .add(w[k].component(i))
                .expect("same grid")
                .scale(0.5 * dt);
            comps.push(prev.add(&inc).expect("same grid"));
        }
        out.push(VectorFieldGrid::new(comps).expect("component count"));
    }
    out
}

/// Δ̃(K, χ): for each t, the normalized integral ∫₀ᵗ K(χ̇^s) ∘ χ^s ds with
/// the outer index of K chosen by `reading`. Grid means are subtracted per
/// time sample (Liouville measure is Lebesgue on the flat torus).
pub fn delta_tilde(
    k_family: &[HarmonicForm],
    path: &Isotopy,
    reading: DeltaReading,
    params: &FlowParams,
) -> Result<Vec<ScalarField>> {
    let m = path.times().samples();
    if k_family.len() != m {
        return Err(Error::TimeGridMismatch(format!(
            "{} harmonic samples for {} time samples",
            k_family.len(),
            m
        )));
    }
    let raw = delta_unnormalized(k_family, path, reading, params)?;
    Ok(raw.into_iter().map(|f| f.normalized()).collect())
}

/// The same integral without normalization (used by the S^α functional).
pub fn delta_unnormalized(
    k_family: &[HarmonicForm],
    path: &Isotopy,
    reading: DeltaReading,
    params: &FlowParams,
) -> Result<Vec<ScalarField>> {
    let m = path.times().samples();
    let grid = *path.grid();
    let d = grid.dim().ambient();

    match reading {
        DeltaReading::OuterFixed => {
            let c = motion_integrals(path, params);
            Ok(par::map_indexed(m, |k| {
                let mut acc = ScalarField::zeros(grid);
                for i in 0..d {
                    let coeff = k_family[k].coeff(i);
                    if coeff != 0.0 {
                        acc = acc
                            .add(&c[k].component(i).scale(coeff))
                            .expect("same grid");
                    }
                }
                acc
            }))
        }
        DeltaReading::Integrand => {
            // integrand I(s) = K_s(χ̇^s) ∘ χ^s, then a cumulative trapezoid
            let integrand: Vec<ScalarField> = par::map_indexed(m, |s| {
                let w = flow::compose_field(&path.velocities()[s], &path.maps()[s], params.interp);
                let mut acc = ScalarField::zeros(grid);
                for i in 0..d {
                    let coeff = k_family[s].coeff(i);
                    if coeff != 0.0 {
                        acc = acc.add(&w.component(i).scale(coeff)).expect("same grid");
                    }
                }
                acc
            });
            let dt = path.times().dt();
            let mut out = Vec::with_capacity(m);
            out.push(ScalarField::zeros(grid));
            for k in 1..m {
                let inc = integrand[k - 1]
                    .add(&integrand[k])?
                    .scale(0.5 * dt);
                let prev: &ScalarField = &out[k - 1];
                out.push(prev.add(&inc)?);
            }
            Ok(out)
        }
    }
}

/// The product (U,H) ⋈ (V,K); its integrated path is φ_{(U,H)} ∘ φ_{(V,K)}
/// up to the integration tolerance. Harmonic parts add exactly.
pub fn group_product(a: &Generator, b: &Generator, params: &Params) -> Result<Generator> {
    a.check_compatible(b)?;
    let phi = flow::integrate(a, &params.flow)?;
    let inverse_path = phi.invert(&params.flow)?;
    product_with_inverse_path(a, b, &inverse_path, params)
}

/// Product given the precomputed inverse path of `a`'s isotopy.
pub fn product_with_inverse_path(
    a: &Generator,
    b: &Generator,
    inverse_path: &Isotopy,
    params: &Params,
) -> Result<Generator> {
    let m = a.times.samples();
    let delta = delta_tilde(b.harms(), inverse_path, params.delta, &params.flow)?;
    let mut hams = Vec::with_capacity(m);
    let mut harms = Vec::with_capacity(m);
    for k in 0..m {
        let v_pulled =
            flow::compose_scalar(b.ham(k), &inverse_path.maps()[k], params.flow.interp);
        let u = a.ham(k).add(&v_pulled)?.add(&delta[k])?;
        hams.push(u.normalized());
        harms.push(a.harm(k).add(b.harm(k)));
    }
    Generator::new(a.grid, a.times, hams, harms)
}

/// The inverse (−U∘φ − Δ̃(H, φ), −H); `group_product(a, group_inverse(a))`
/// integrates to the identity path within tolerance.
pub fn group_inverse(a: &Generator, params: &Params) -> Result<Generator> {
    let phi = flow::integrate(a, &params.flow)?;
    inverse_with_path(a, &phi, params)
}

/// Inverse given the precomputed isotopy of `a`.
pub fn inverse_with_path(a: &Generator, phi: &Isotopy, params: &Params) -> Result<Generator> {
    let m = a.times.samples();
    let delta = delta_tilde(a.harms(), phi, params.delta, &params.flow)?;
    let mut hams = Vec::with_capacity(m);
    let mut harms = Vec::with_capacity(m);
    for k in 0..m {
        let u_pulled = flow::compose_scalar(a.ham(k), &phi.maps()[k], params.flow.interp);
        let u = u_pulled.scale(-1.0).sub(&delta[k])?;
        hams.push(u.normalized());
        harms.push(a.harm(k).scale(-1.0));
    }
    Generator::new(a.grid, a.times, hams, harms)
}

/// The D² metric: (‖X_a − X_b‖^∞ + ‖X_ā − X_b̄‖^∞)/2 with the Eq.-(3)
/// inverses ā, b̄.
pub fn d2_distance(a: &Generator, b: &Generator, params: &Params) -> Result<f64> {
    let forward = linf_family_distance(a, b)?;
    let ai = group_inverse(a, params)?;
    let bi = group_inverse(b, params)?;
    let backward = linf_family_distance(&ai, &bi)?;
    Ok(0.5 * (forward + backward))
}

/// Consecutive-gap table of a generator sequence: D² distances, plain L^∞
/// gaps, and the gaps of the pushforward families Y_t^i = −(φ_i^{−t})_*(X_t^i)
/// (equivalently, of the inverse generators).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CauchyReport {
    pub d2_gaps: Vec<f64>,
    pub linf_gaps: Vec<f64>,
    pub pushforward_gaps: Vec<f64>,
    pub d2_monotone: bool,
    pub pushforward_monotone: bool,
}

pub fn cauchy_report_gen(seq: &[Generator], params: &Params) -> Result<CauchyReport> {
    if seq.len() < 2 {
        return Err(Error::InvalidParameter(
            "a Cauchy report needs at least two generators".into(),
        ));
    }
    let inverses: Vec<Generator> = seq
        .iter()
        .map(|g| group_inverse(g, params))
        .collect::<Result<_>>()?;

    let mut d2_gaps = Vec::with_capacity(seq.len() - 1);
    let mut linf_gaps = Vec::with_capacity(seq.len() - 1);
    let mut push_gaps = Vec::with_capacity(seq.len() - 1);
    for i in 0..seq.len() - 1 {
        let fwd = linf_family_distance(&seq[i], &seq[i + 1])?;
        let bwd = linf_family_distance(&inverses[i], &inverses[i + 1])?;
        linf_gaps.push(fwd);
        push_gaps.push(bwd);
        d2_gaps.push(0.5 * (fwd + bwd));
    }
    let monotone = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    Ok(CauchyReport {
        d2_monotone: monotone(&d2_gaps),
        pushforward_monotone: monotone(&push_gaps),
        d2_gaps,
        linf_gaps,
        pushforward_gaps: push_gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusDim;
    use crate::scenarios::{build_rotation, RotationSpec};
    use std::f64::consts::TAU;

    fn grid(n: usize, pts: usize) -> GridSpec {
        GridSpec::new(TorusDim::new(n).unwrap(), pts).unwrap()
    }

    fn times(steps: usize) -> TimeGrid {
        TimeGrid::unit(steps).unwrap()
    }

    #[test]
    fn vf_norm_cases() {
        let g = grid(1, 64);
        assert_eq!(vf_norm(&ScalarField::zeros(g), &HarmonicForm::zero(2)), 0.0);
        // (0, a dθ2 − b dθ1) → |a| + |b|
        let h = HarmonicForm::new(vec![-0.4, 0.3]);
        assert!((vf_norm(&ScalarField::zeros(g), &h) - 0.7).abs() < 1e-15);
        // (sin 2πθ1, dθ1) → osc(sin) + 1
        let u = ScalarField::from_fn(g, |c| (TAU * c[0]).sin()).normalized();
        let v = vf_norm(&u, &HarmonicForm::new(vec![1.0, 0.0]));
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn linf_family_norm_cases() {
        let g = grid(1, 16);
        let t = times(200);
        assert_eq!(linf_family_norm(&Generator::zero(g, t)), 0.0);
        let auton = Generator::harmonic(g, t, |_| HarmonicForm::new(vec![0.0, 0.25])).unwrap();
        assert!((linf_family_norm(&auton) - 0.25).abs() < 1e-15);
        let wave = Generator::harmonic(g, t, |s| HarmonicForm::new(vec![(TAU * s).sin(), 0.0]))
            .unwrap();
        // M = 200 hits t = 1/4 exactly, so the max is 1
        assert!((linf_family_norm(&wave) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_tilde_degenerate_cases() {
        let p = Params::default();
        let g = grid(1, 16);
        let t = times(20);
        let zero_family: Vec<HarmonicForm> =
            (0..t.samples()).map(|_| HarmonicForm::zero(2)).collect();
        let id = Isotopy::identity(g, t);
        for f in delta_tilde(&zero_family, &id, p.delta, &p.flow).unwrap() {
            assert_eq!(f.sup_norm(), 0.0);
        }
        // identity path with nonzero K: φ̇ = 0
        let k_family: Vec<HarmonicForm> = (0..t.samples())
            .map(|_| HarmonicForm::new(vec![1.0, 2.0]))
            .collect();
        for f in delta_tilde(&k_family, &id, p.delta, &p.flow).unwrap() {
            assert!(f.sup_norm() < 1e-14);
        }
    }

    #[test]
    fn delta_tilde_vanishes_on_rotations_after_normalization() {
        // constant K on a rotation flow: the integrand is constant in x, so
        // the normalization kills it.
        let p = Params::default();
        let g = grid(1, 16);
        let t = times(40);
        let rot = build_rotation(&RotationSpec::new(vec![0.3, -0.2]), g, t).unwrap();
        let phi = flow::integrate(&rot, &p.flow).unwrap();
        let k_family: Vec<HarmonicForm> = (0..t.samples())
            .map(|_| HarmonicForm::new(vec![0.7, 0.1]))
            .collect();
        for f in delta_tilde(&k_family, &phi, p.delta, &p.flow).unwrap() {
            assert!(f.sup_norm() < 1e-12);
        }
    }

    #[test]
    fn delta_tilde_matches_lift_telescoping_oracle() {
        // For the literal reading with constant K the unnormalized integral
        // telescopes: Δ_t = Σ_j K_j (lift_j(t, x) − x_j), since the integrand
        // is d/ds of the displacement lift. Independent of the quadrature
        // route used by the implementation.
        let p = Params::default();
        let g = grid(1, 32);
        let t = times(100);
        let u = ScalarField::from_fn(g, |c| 0.03 * (TAU * c[0]).sin() * (TAU * c[1]).cos());
        let gen = Generator::hamiltonian(g, t, |_, _| u.clone()).unwrap();
        let phi = flow::integrate(&gen, &p.flow).unwrap();
        let kvec = HarmonicForm::new(vec![0.8, -0.5]);
        let k_family: Vec<HarmonicForm> = (0..t.samples()).map(|_| kvec.clone()).collect();
        let raw = delta_unnormalized(&k_family, &phi, DeltaReading::OuterFixed, &p.flow).unwrap();
        let mut worst = 0.0f64;
        for (k, f) in raw.iter().enumerate() {
            let mut oracle = ScalarField::zeros(g);
            for i in 0..2 {
                oracle = oracle
                    .add(&phi.maps()[k].component(i).scale(kvec.coeff(i)))
                    .unwrap();
            }
            worst = worst.max(f.sub(&oracle).unwrap().sup_norm());
        }
        assert!(worst < 1e-4, "telescoping gap {worst}");
    }

    #[test]
    fn product_with_identity_is_exact() {
        let p = Params::default();
        let g = grid(1, 16);
        let t = times(20);
        let u = ScalarField::from_fn(g, |c| 0.2 * (TAU * c[1]).cos());
        let a = Generator::new(
            g,
            t,
            (0..t.samples()).map(|_| u.clone()).collect(),
            (0..t.samples())
                .map(|_| HarmonicForm::new(vec![0.1, 0.0]))
                .collect(),
        )
        .unwrap();
        let e = Generator::zero(g, t);
        let prod = group_product(&a, &e, &p).unwrap();
        for k in 0..t.samples() {
            assert!(prod.ham(k).sub(a.ham(k)).unwrap().sup_norm() < 1e-12);
            assert!(prod.harm(k).sub(a.harm(k)).norm() < 1e-15);
        }
    }

    #[test]
    fn constant_rotations_compose_additively() {
        let p = Params::default();
        let g = grid(1, 16);
        let t = times(40);
        let a = build_rotation(&RotationSpec::new(vec![0.2, 0.0]), g, t).unwrap();
        let b = build_rotation(&RotationSpec::new(vec![0.1, 0.3]), g, t).unwrap();
        let prod = group_product(&a, &b, &p).unwrap();
        for k in [0, 20, 40] {
            assert!(prod.ham(k).sup_norm() < 1e-12, "Δ̃ term should normalize away");
            let expect = a.harm(k).add(b.harm(k));
            assert!(prod.harm(k).sub(&expect).norm() < 1e-15);
        }
    }

    #[test]
    fn hamiltonian_product_matches_classical_composition() {
        let p = Params::default();
        let g = grid(1, 32);
        let t = times(60);
        let u = ScalarField::from_fn(g, |c| 0.1 * (TAU * c[0]).sin());
        let v = ScalarField::from_fn(g, |c| 0.1 * (TAU * c[1]).cos());
        let a = Generator::hamiltonian(g, t, |_, _| u.clone()).unwrap();
        let b = Generator::hamiltonian(g, t, |_, _| v.clone()).unwrap();
        let prod = group_product(&a, &b, &p).unwrap();
        // Independent route: U + V∘φ_U^{-1} assembled by hand.
        let phi = flow::integrate(&a, &p.flow).unwrap();
        let inv = phi.inverse_maps(&p.flow).unwrap();
        let mut worst = 0.0f64;
        for k in [0, 30, 60] {
            let pulled = flow::compose_scalar(&v, &inv[k], p.flow.interp);
            let expect = u.add(&pulled).unwrap().normalized();
            worst = worst.max(prod.ham(k).sub(&expect).unwrap().sup_norm());
            assert_eq!(prod.harm(k).norm(), 0.0);
        }
        assert!(worst < 1e-12, "Δ̃(0,·) must vanish: {worst}");
    }

    #[test]
    fn inverse_of_rotation_is_opposite_rotation() {
        let p = Params::default();
        let g = grid(1, 16);
        let t = times(40);
        let a = build_rotation(&RotationSpec::new(vec![0.3, 0.4]), g, t).unwrap();
        let inv = group_inverse(&a, &p).unwrap();
        for k in [0, 40] {
            assert!(inv.ham(k).sup_norm() < 1e-12);
            assert!(inv.harm(k).add(a.harm(k)).norm() < 1e-15);
        }
        let zero = group_inverse(&Generator::zero(g, t), &p).unwrap();
        assert_eq!(linf_family_norm(&zero), 0.0);
    }

    #[test]
    fn inverse_of_hamiltonian_matches_formula() {
        let p = Params::default();
        let g = grid(1, 32);
        let t = times(60);
        let u = ScalarField::from_fn(g, |c| 0.15 * (TAU * c[0]).sin() * (TAU * c[1]).sin());
        let a = Generator::hamiltonian(g, t, |_, _| u.clone()).unwrap();
        let inv = group_inverse(&a, &p).unwrap();
        let phi = flow::integrate(&a, &p.flow).unwrap();
        let mut worst = 0.0f64;
        for k in [0, 30, 60] {
            let expect = flow::compose_scalar(&u, &phi.maps()[k], p.flow.interp)
                .scale(-1.0)
                .normalized();
            worst = worst.max(inv.ham(k).sub(&expect).unwrap().sup_norm());
        }
        assert!(worst < 1e-12);
    }

    #[test]
    fn d2_metric_on_constant_rotations() {
        let p = Params::default();
        let g = grid(1, 16);
        let t = times(40);
        let a = build_rotation(&RotationSpec::new(vec![0.5, 0.0]), g, t).unwrap();
        let b = build_rotation(&RotationSpec::new(vec![0.2, 0.1]), g, t).unwrap();
        assert!(d2_distance(&a, &a, &p).unwrap() < 1e-12);
        // forward |H−K| = |0.3| + |−0.1| = 0.4; inverse parts give the same
        let d = d2_distance(&a, &b, &p).unwrap();
        assert!((d - 0.4).abs() < 1e-10, "D² = {d}");
        let e = Generator::zero(g, t);
        let dz = d2_distance(&a, &e, &p).unwrap();
        assert!((dz - 0.5).abs() < 1e-10);
        // symmetry
        let d2 = d2_distance(&b, &a, &p).unwrap();
        assert!((d - d2).abs() < 1e-12);
    }

    #[test]
    fn d2_triangle_inequality_on_rotation_triples() {
        let p = Params::default();
        let g = grid(1, 8);
        let t = times(20);
        let mk = |v: [f64; 2]| build_rotation(&RotationSpec::new(v.to_vec()), g, t).unwrap();
        let triples = [
            ([0.1, 0.0], [0.0, 0.2], [0.3, -0.1]),
            ([0.25, 0.25], [-0.2, 0.1], [0.0, 0.0]),
        ];
        for (x, y, z) in triples {
            let (a, b, c) = (mk(x), mk(y), mk(z));
            let ab = d2_distance(&a, &b, &p).unwrap();
            let bc = d2_distance(&b, &c, &p).unwrap();
            let ac = d2_distance(&a, &c, &p).unwrap();
            assert!(ac <= ab + bc + 1e-12);
        }
    }

    #[test]
    fn cauchy_gaps_of_reparametrized_rotations() {
        let p = Params::default();
        let g = grid(1, 16);
        let t = times(40);
        let h = HarmonicForm::new(vec![-0.4, 0.3]);
        let seq: Vec<Generator> = (1..=5)
            .map(|j| {
                let c = j as f64 / (1.0 + j as f64);
                Generator::harmonic(g, t, |_| h.scale(c)).unwrap()
            })
            .collect();
        let rep = cauchy_report_gen(&seq, &p).unwrap();
        for (i, gap) in rep.d2_gaps.iter().enumerate() {
            let j = (i + 1) as f64;
            let expect = h.norm() / ((j + 1.0) * (j + 2.0));
            assert!((gap - expect).abs() < 1e-10, "gap {gap} vs {expect}");
        }
        assert!(rep.d2_monotone);
        assert!(rep.pushforward_monotone);
        // constant sequence: all gaps zero
        let const_seq = vec![seq[0].clone(), seq[0].clone(), seq[0].clone()];
        let rep0 = cauchy_report_gen(&const_seq, &p).unwrap();
        assert!(rep0.d2_gaps.iter().all(|&x| x < 1e-13));
    }
}
