//! Constructive deformations.
//!
//! The flux-killing homotopy: for a generator (U, H) with ∫₀¹ H_t dt = 0,
//! the fields Y_t = −(∫₀ᵗ H_u du)^♯ are harmonic (constant), their s-flows
//! θ_s^t satisfy θ_s^0 = θ_s^1 = id, and ψ_t = θ_1^t ∘ φ_t is a Hamiltonian
//! path with the same endpoints as φ_t. The two-parameter family
//! H(s, t) = θ_s^t ∘ φ_t realizes the homotopy.
//!
//! The sequential deformation takes a family of harmonic fields Z_t and
//! builds Z^{(s,t)} = t·Z_{st} − 2s·(∫₀ᵗ ι(Z_u)ω du)^♯ together with
//! Y^t = −∫₀ᵗ Z_u du, the s-flows of Y^t, the s-paths G_{s,t} of Z^{(s,t)}
//! and the t-velocities of G; the consecutive-gap bounds of those families
//! transfer Cauchy-ness from the input sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{HarmonicForm, VectorFieldGrid};
use crate::flow::{self, FlowParams, Isotopy, TorusMap};
use crate::generator::{Generator, Params};
use crate::grid::{cumulative_trapezoid, GridSpec, TimeGrid};
use crate::symplectic;

/// An (s, t)-indexed family of torus maps with map(0, t) = id for all t.
/// Stored s-major: `maps[si][ti]`.
#[derive(Debug, Clone)]
pub struct TwoParamFamily {
    pub s_times: TimeGrid,
    pub t_times: TimeGrid,
    pub maps: Vec<Vec<VectorFieldGrid>>,
    grid: GridSpec,
}

impl TwoParamFamily {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn map(&self, si: usize, ti: usize) -> TorusMap {
        TorusMap::new(self.maps[si][ti].clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeinsteinReport {
    /// d_{C⁰}(θ_s^0, id) maximized over s; zero because Y_0 = 0.
    pub boundary_defect_t0: f64,
    /// d_{C⁰}(θ_s^1, id) maximized over s; small iff the flux vanishes.
    pub boundary_defect_t1: f64,
    /// max_t |harmonic part| of the recovered generator of the output path.
    pub harmonic_residual: f64,
    /// d_{C⁰} between the endpoints of the output and input paths.
    pub endpoint_gap: f64,
}

#[derive(Debug)]
pub struct WeinsteinOutput {
    pub ham_isotopy: Isotopy,
    pub family: TwoParamFamily,
    pub report: WeinsteinReport,
}

#[derive(Debug, Clone, Copy)]
pub struct DeformParams {
    /// s-samples of the stored two-parameter family.
    pub s_samples: usize,
    /// t-samples of the stored family (coarser than the path is fine).
    pub t_samples: usize,
    /// |flux| gate for the Weinstein deformation.
    pub flux_tol: f64,
    /// pointwise harmonicity gate for the sequential deformation inputs.
    pub harmonic_tol: f64,
}

impl Default for DeformParams {
    fn default() -> Self {
        Self {
            s_samples: 17,
            t_samples: 21,
            flux_tol: 1e-6,
            harmonic_tol: 1e-8,
        }
    }
}

/// Per-sample fields Y_t = −(∫₀ᵗ H_u du)^♯ as constant vectors.
fn weinstein_fields(g: &Generator) -> Result<Vec<Vec<f64>>> {
    let d = g.grid().dim().ambient();
    let dt = g.times().dt();
    let m = g.times().samples();
    // cumulative trapezoid of the harmonic family, per coefficient
    let mut cums: Vec<Vec<f64>> = Vec::with_capacity(d);
    for i in 0..d {
        let samples: Vec<f64> = g.harms().iter().map(|h| h.coeff(i)).collect();
        cums.push(cumulative_trapezoid(&samples, dt));
    }
    (0..m)
        .map(|k| {
            let h = HarmonicForm::new((0..d).map(|i| cums[i][k]).collect());
            Ok(symplectic::sharp_harmonic(&h)?
                .into_iter()
                .map(|x| -x)
                .collect())
        })
        .collect()
}

/// Flux-killing deformation of a flux-zero generator. Preconditions:
/// |flux(g)| ≤ flux_tol; the Hamiltonian part of g may be nonzero and is
/// carried along by composing with the full integrated path.
pub fn weinstein_deform(
    g: &Generator,
    params: &Params,
    dparams: &DeformParams,
) -> Result<WeinsteinOutput> {
    let flux_norm = crate::flux::flux(g).norm();
    if flux_norm > dparams.flux_tol {
        return Err(Error::FluxNotZero {
            value: flux_norm,
            tol: dparams.flux_tol,
        });
    }
    let grid = *g.grid();
    let phi = flow::integrate(g, &params.flow)?;
    let y = weinstein_fields(g)?;
    let m = g.times().samples();

    // ψ_t = θ_1^t ∘ φ_t: the s-flow of the constant field Y_t to s = 1 is
    // the translation by Y_t, so the deformed displacement is d_φ + Y(t).
    let maps: Vec<VectorFieldGrid> = (0..m)
        .map(|k| {
            let shift = VectorFieldGrid::constant(grid, &y[k])?;
            phi.maps()[k].add(&shift)
        })
        .collect::<Result<_>>()?;
    let ham_isotopy = Isotopy::from_displacements(grid, *g.times(), maps, &params.flow)?;

    // the stored family θ_s^t on the coarse (s, t) grid, via the flow
    // machinery run in s
    let s_times = TimeGrid::new(dparams.s_samples, 1.0)?;
    let t_times = TimeGrid::new(dparams.t_samples, g.times().t_end())?;
    let mut family_maps: Vec<Vec<VectorFieldGrid>> = Vec::with_capacity(dparams.s_samples);
    for si in 0..dparams.s_samples {
        let s = s_times.time(si);
        let mut row = Vec::with_capacity(dparams.t_samples);
        for ti in 0..dparams.t_samples {
            let k = g.times().index_of(t_times.time(ti))?;
            let offset: Vec<f64> = y[k].iter().map(|c| c * s).collect();
            row.push(VectorFieldGrid::constant(grid, &offset)?);
        }
        family_maps.push(row);
    }
    let family = TwoParamFamily {
        s_times,
        t_times,
        maps: family_maps,
        grid,
    };

    // postconditions
    let boundary_defect_t0 = (0..dparams.s_samples)
        .map(|si| family.map(si, 0).c0_norm())
        .fold(0.0, f64::max);
    let boundary_defect_t1 = (0..dparams.s_samples)
        .map(|si| family.map(si, dparams.t_samples - 1).c0_norm())
        .fold(0.0, f64::max);
    let recovered = flow::generator_of(&ham_isotopy, &params.flow, &params.hodge)?;
    let harmonic_residual = recovered.max_harmonic_norm();
    let endpoint_gap = ham_isotopy.time_one().c0_distance(&phi.time_one())?;

    Ok(WeinsteinOutput {
        ham_isotopy,
        family,
        report: WeinsteinReport {
            boundary_defect_t0,
            boundary_defect_t1,
            harmonic_residual,
            endpoint_gap,
        },
    })
}

/// Boundary-defect table of a two-parameter family against a base path:
/// H(s, t) = family(s, t) ∘ base(t).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomotopyReport {
    /// max_s d_{C⁰}(H(s, 0), id).
    pub start_defect: f64,
    /// max_s d_{C⁰}(H(s, 1), H(0, 1)): fixed-endpoint defect.
    pub end_defect: f64,
    /// d̄(H(0, ·), base): the s = 0 slice must be the base path.
    pub base_match: f64,
}

pub fn homotopy_eval(
    family: &TwoParamFamily,
    base: &Isotopy,
    params: &FlowParams,
) -> Result<HomotopyReport> {
    family.grid.check_same(base.grid())?;
    let s_n = family.s_times.samples();
    let t_n = family.t_times.samples();

    let base_slice = |ti: usize| -> Result<VectorFieldGrid> {
        let k = base.times().index_of(family.t_times.time(ti))?;
        Ok(base.maps()[k].clone())
    };

    let compose_at = |si: usize, ti: usize| -> Result<TorusMap> {
        let b = base_slice(ti)?;
        Ok(TorusMap::new(flow::compose_displacements(
            &family.maps[si][ti],
            &b,
            params.interp,
        )))
    };

    let mut start_defect = 0.0f64;
    let mut end_defect = 0.0f64;
    let h01 = compose_at(0, t_n - 1)?;
    for si in 0..s_n {
        start_defect = start_defect.max(compose_at(si, 0)?.c0_norm());
        end_defect = end_defect.max(compose_at(si, t_n - 1)?.c0_distance(&h01)?);
    }

    let mut base_match = 0.0f64;
    for ti in 0..t_n {
        let h0 = compose_at(0, ti)?;
        base_match = base_match.max(h0.c0_distance(&TorusMap::new(base_slice(ti)?))?);
    }

    Ok(HomotopyReport {
        start_defect,
        end_defect,
        base_match,
    })
}

/// The sequential-deformation bundle of one harmonic family.
#[derive(Debug)]
pub struct SequentialBundle {
    /// Y^t = −∫₀ᵗ Z_u du as constant vectors per t-sample of the input grid.
    pub y: Vec<Vec<f64>>,
    /// s-flows of Y^t on the stored (s, t) grid: translations by s·Y^t.
    pub theta: TwoParamFamily,
    /// s-paths G_{s,t} of the fields Z^{(s,t)}, on the stored (s, t) grid.
    pub g_family: TwoParamFamily,
    /// t-velocities V_{s,t} = (d/dt G_{s,t}) ∘ G_{s,t}^{-1} as constant
    /// vectors on the stored grid, s-major.
    pub v_family: Vec<Vec<Vec<f64>>>,
    /// constant coefficients of the input fields per t-sample.
    pub z_consts: Vec<Vec<f64>>,
    times: TimeGrid,
}

/// Extract the constant coefficient vector of a harmonic vector field,
/// erroring when the field deviates pointwise from its mean.
fn harmonic_constant(z: &VectorFieldGrid, tol: f64) -> Result<Vec<f64>> {
    let means = z.component_means();
    let mut dev = 0.0f64;
    for (i, c) in z.components().iter().enumerate() {
        for &v in c.values() {
            dev = dev.max((v - means[i]).abs());
        }
    }
    if dev > tol {
        return Err(Error::NotHarmonic(dev));
    }
    Ok(means)
}

/// The coefficient vector of Z^{(s,t)} = t·Z_{st} − 2s·(∫₀ᵗ ι(Z_u)ω du)^♯
/// for constant input fields; Z_{st} is linearly interpolated in time.
fn z_st(z_consts: &[Vec<f64>], cums: &[Vec<f64>], times: &TimeGrid, s: f64, t: f64) -> Vec<f64> {
    let d = z_consts[0].len();
    // Z at time s·t, linear interpolation on the sample grid
    let x = (s * t) / times.dt();
    let k = (x.floor() as usize).min(times.samples() - 2);
    let frac = (x - k as f64).clamp(0.0, 1.0);
    let mut z_at = vec![0.0; d];
    for i in 0..d {
        z_at[i] = (1.0 - frac) * z_consts[k][i] + frac * z_consts[k + 1][i];
    }
    // (∫₀ᵗ ι(Z_u)ω du)^♯ = ∫₀ᵗ Z_u du for constant fields (sharp∘flat = id)
    let kt = times.index_of(t).expect("t on the stored grid");
    let mut out = vec![0.0; d];
    for i in 0..d {
        out[i] = t * z_at[i] - 2.0 * s * cums[i][kt];
    }
    out
}

/// Build the sequential-deformation bundle for one family of harmonic
/// fields sampled on `times`.
pub fn ldefor2_family(
    z: &[VectorFieldGrid],
    times: &TimeGrid,
    dparams: &DeformParams,
) -> Result<SequentialBundle> {
    if z.len() != times.samples() {
        return Err(Error::TimeGridMismatch(format!(
            "{} fields for {} samples",
            z.len(),
            times.samples()
        )));
    }
    let grid = *z[0].grid();
    let d = grid.dim().ambient();
    let z_consts: Vec<Vec<f64>> = z
        .iter()
        .map(|f| harmonic_constant(f, dparams.harmonic_tol))
        .collect::<Result<_>>()?;

    // cumulative integrals of the coefficients
    let dt = times.dt();
    let mut cums: Vec<Vec<f64>> = Vec::with_capacity(d);
    for i in 0..d {
        let samples: Vec<f64> = z_consts.iter().map(|v| v[i]).collect();
        cums.push(cumulative_trapezoid(&samples, dt));
    }
    // item 1: Y^t = −∫₀ᵗ Z_u du, harmonic per construction
    let y: Vec<Vec<f64>> = (0..times.samples())
        .map(|k| (0..d).map(|i| -cums[i][k]).collect())
        .collect();

    let s_times = TimeGrid::new(dparams.s_samples, 1.0)?;
    let t_times = TimeGrid::new(dparams.t_samples, times.t_end())?;

    // item 2: s-flows of the constant fields Y^t are translations s·Y^t
    let mut theta_maps = Vec::with_capacity(dparams.s_samples);
    for si in 0..dparams.s_samples {
        let s = s_times.time(si);
        let mut row = Vec::with_capacity(dparams.t_samples);
        for ti in 0..dparams.t_samples {
            let k = times.index_of(t_times.time(ti))?;
            let offset: Vec<f64> = y[k].iter().map(|c| c * s).collect();
            row.push(VectorFieldGrid::constant(grid, &offset)?);
        }
        theta_maps.push(row);
    }
    let theta = TwoParamFamily {
        s_times,
        t_times,
        maps: theta_maps,
        grid,
    };

    // item 3: G_{s,t} integrates Z^{(σ,t)} in σ from 0 to s; the integrand
    // is constant in space, so the path is the translation by
    // ∫₀^s Z^{(σ,t)} dσ, accumulated with the trapezoid rule on the s-grid.
    let mut g_maps: Vec<Vec<VectorFieldGrid>> = Vec::with_capacity(dparams.s_samples);
    let ds = s_times.dt();
    let mut offsets: Vec<Vec<Vec<f64>>> = Vec::with_capacity(dparams.s_samples);
    for si in 0..dparams.s_samples {
        let mut row_offsets = Vec::with_capacity(dparams.t_samples);
        for ti in 0..dparams.t_samples {
            let t = t_times.time(ti);
            if si == 0 {
                row_offsets.push(vec![0.0; d]);
            } else {
                let s_prev = s_times.time(si - 1);
                let s_here = s_times.time(si);
                let za = z_st(&z_consts, &cums, times, s_prev, t);
                let zb = z_st(&z_consts, &cums, times, s_here, t);
                let prev = &offsets[si - 1][ti];
                row_offsets.push(
                    (0..d)
                        .map(|i| prev[i] + 0.5 * ds * (za[i] + zb[i]))
                        .collect(),
                );
            }
        }
        offsets.push(row_offsets);
    }
    for row in &offsets {
        let mut maps_row = Vec::with_capacity(dparams.t_samples);
        for off in row {
            maps_row.push(VectorFieldGrid::constant(grid, off)?);
        }
        g_maps.push(maps_row);
    }
    let g_family = TwoParamFamily {
        s_times,
        t_times,
        maps: g_maps,
        grid,
    };

    // item 4: V_{s,t} = (d/dt G) ∘ G^{-1}; for translations this is the
    // t-derivative of the offset, by central differences on the stored grid
    let dt_family = t_times.dt();
    let mut v_family = Vec::with_capacity(dparams.s_samples);
    for row in offsets.iter() {
        let mut v_row = Vec::with_capacity(dparams.t_samples);
        for ti in 0..dparams.t_samples {
            let v: Vec<f64> = (0..d)
                .map(|i| {
                    let f = |j: usize| row[j][i];
                    if ti == 0 {
                        (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * dt_family)
                    } else if ti == dparams.t_samples - 1 {
                        (3.0 * f(ti) - 4.0 * f(ti - 1) + f(ti - 2)) / (2.0 * dt_family)
                    } else {
                        (f(ti + 1) - f(ti - 1)) / (2.0 * dt_family)
                    }
                })
                .collect();
            v_row.push(v);
        }
        v_family.push(v_row);
    }

    Ok(SequentialBundle {
        y,
        theta,
        g_family,
        v_family,
        z_consts,
        times: *times,
    })
}

/// Consecutive-gap measurements between two bundle inputs, for the Cauchy
/// transfer estimates of the sequential deformation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequentialGapReport {
    /// ‖Z_i − Z_{i+1}‖^∞ over the input t-grid.
    pub z_gap: f64,
    /// ‖Y_i − Y_{i+1}‖^∞; bounded by z_gap.
    pub y_gap: f64,
    /// sup over the stored (s, t) grid of ‖Z^{(s,t)}_i − Z^{(s,t)}_{i+1}‖;
    /// bounded by 3·z_gap.
    pub z_st_gap: f64,
    /// per-fixed-s sup over t of |V_i − V_{i+1}|: one defect per s-slice.
    /// Whether the convergence claim is per-slice or joint is left open, so
    /// both the slice values and their joint sup are reported.
    pub v_gap_per_s: Vec<f64>,
    /// joint sup over (s, t) of |V_i − V_{i+1}|.
    pub v_gap: f64,
}

/// Banyaga norm of a constant vector field: |flat(v)| = Σ|v_i|.
fn const_field_norm(v: &[f64]) -> f64 {
    symplectic::flat_constant(v)
        .map(|h| h.norm())
        .unwrap_or(0.0)
}

pub fn ldefor2_gaps(
    a: &SequentialBundle,
    b: &SequentialBundle,
    dparams: &DeformParams,
) -> Result<SequentialGapReport> {
    a.times.check_same(&b.times)?;
    let d = a.z_consts[0].len();
    let diff_norm = |x: &[f64], y: &[f64]| {
        let v: Vec<f64> = (0..d).map(|i| x[i] - y[i]).collect();
        const_field_norm(&v)
    };

    let z_gap = a
        .z_consts
        .iter()
        .zip(&b.z_consts)
        .map(|(x, y)| diff_norm(x, y))
        .fold(0.0, f64::max);
    let y_gap = a
        .y
        .iter()
        .zip(&b.y)
        .map(|(x, y)| diff_norm(x, y))
        .fold(0.0, f64::max);

    // rebuild Z^{(s,t)} coefficients on the stored grid for both bundles
    let dt = a.times.dt();
    let cums = |bundle: &SequentialBundle| -> Vec<Vec<f64>> {
        (0..d)
            .map(|i| {
                let samples: Vec<f64> = bundle.z_consts.iter().map(|v| v[i]).collect();
                cumulative_trapezoid(&samples, dt)
            })
            .collect()
    };
    let ca = cums(a);
    let cb = cums(b);
    let s_times = TimeGrid::new(dparams.s_samples, 1.0)?;
    let t_times = TimeGrid::new(dparams.t_samples, a.times.t_end())?;
    let mut z_st_gap = 0.0f64;
    for si in 0..dparams.s_samples {
        for ti in 0..dparams.t_samples {
            let (s, t) = (s_times.time(si), t_times.time(ti));
            let za = z_st(&a.z_consts, &ca, &a.times, s, t);
            let zb = z_st(&b.z_consts, &cb, &b.times, s, t);
            z_st_gap = z_st_gap.max(diff_norm(&za, &zb));
        }
    }

    let mut v_gap_per_s = Vec::with_capacity(a.v_family.len());
    for (row_a, row_b) in a.v_family.iter().zip(&b.v_family) {
        let mut slice_gap = 0.0f64;
        for (va, vb) in row_a.iter().zip(row_b) {
            slice_gap = slice_gap.max(diff_norm(va, vb));
        }
        v_gap_per_s.push(slice_gap);
    }
    let v_gap = v_gap_per_s.iter().copied().fold(0.0, f64::max);

    Ok(SequentialGapReport {
        z_gap,
        y_gap,
        z_st_gap,
        v_gap_per_s,
        v_gap,
    })
}
