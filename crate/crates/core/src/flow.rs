//! Isotopy integration and analysis.
//!
//! A symplectic path φ_t solves dφ_t/dt = Z_t ∘ φ_t with Z_t =
//! (dU_t + H_t)^♯. Paths are stored as per-time displacement fields with a
//! continuous lift: real-valued, not reduced mod 1, anchored at zero at
//! t = 0, with consecutive jumps below 1/2 per coordinate. Velocities are
//! cached per time sample; inverse maps are computed lazily by damped
//! fixed-point iteration.

use once_cell::sync::OnceCell;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorFieldGrid};
use crate::generator::Generator;
use crate::grid::{wrap_signed, GridSpec, TimeGrid};
use crate::hodge::{self, HodgeParams};
use crate::interp::{self, InterpMethod};
use crate::par;
use crate::symplectic;

/// Knobs of the flow machinery. `substeps` subdivides each sample interval
/// of the RK4 integrator; the inverse solver is a damped fixed point on
/// displacement fields.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlowParams {
    pub interp: InterpMethod,
    pub substeps: usize,
    pub inverse_tol: f64,
    pub inverse_max_iters: usize,
    pub inverse_damping: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            interp: InterpMethod::Linear,
            substeps: 1,
            inverse_tol: 1e-10,
            inverse_max_iters: 100,
            inverse_damping: 1.0,
        }
    }
}

/// One time slice of a path: a torus map given by its displacement field.
#[derive(Debug, Clone)]
pub struct TorusMap {
    grid: GridSpec,
    disp: VectorFieldGrid,
}

impl TorusMap {
    pub fn identity(grid: GridSpec) -> Self {
        Self {
            grid,
            disp: VectorFieldGrid::zeros(grid),
        }
    }

    pub fn new(disp: VectorFieldGrid) -> Self {
        Self {
            grid: *disp.grid(),
            disp,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn displacement(&self) -> &VectorFieldGrid {
        &self.disp
    }

    /// Image of an arbitrary position (unwrapped arithmetic).
    pub fn eval(&self, pos: &[f64], method: InterpMethod, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = pos[i] + interp::eval_scalar(self.disp.component(i), pos, method);
        }
    }

    /// Sup over the grid of the toroidal distance to another map.
    pub fn c0_distance(&self, other: &TorusMap) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let d = self.grid.dim().ambient();
        Ok(par::max_indexed(self.grid.len(), |idx| {
            let mut acc = 0.0;
            for i in 0..d {
                let a = self.disp.component(i).values()[idx];
                let b = other.disp.component(i).values()[idx];
                let w = wrap_signed(a - b);
                acc += w * w;
            }
            acc.sqrt()
        }))
    }

    /// Distance to the identity.
    pub fn c0_norm(&self) -> f64 {
        let d = self.grid.dim().ambient();
        par::max_indexed(self.grid.len(), |idx| {
            let mut acc = 0.0;
            for i in 0..d {
                let w = wrap_signed(self.disp.component(i).values()[idx]);
                acc += w * w;
            }
            acc.sqrt()
        })
    }
}

/// A time-sampled path of torus maps with lifts, velocities and lazily
/// computed inverses.
#[derive(Debug)]
pub struct Isotopy {
    grid: GridSpec,
    times: TimeGrid,
    maps: Vec<VectorFieldGrid>,
    velocities: Vec<VectorFieldGrid>,
    inverses: OnceCell<Vec<VectorFieldGrid>>,
}

impl Clone for Isotopy {
    fn clone(&self) -> Self {
        Self {
            grid: self.grid,
            times: self.times,
            maps: self.maps.clone(),
            velocities: self.velocities.clone(),
            inverses: self.inverses.clone(),
        }
    }
}

impl Isotopy {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    /// Displacement fields, one per time sample.
    pub fn maps(&self) -> &[VectorFieldGrid] {
        &self.maps
    }

    /// Eulerian velocity fields, one per time sample.
    pub fn velocities(&self) -> &[VectorFieldGrid] {
        &self.velocities
    }

    pub fn slice(&self, k: usize) -> TorusMap {
        TorusMap::new(self.maps[k].clone())
    }

    pub fn time_one(&self) -> TorusMap {
        self.slice(self.times.samples() - 1)
    }

    /// The constant identity path.
    pub fn identity(grid: GridSpec, times: TimeGrid) -> Self {
        let maps = (0..times.samples())
            .map(|_| VectorFieldGrid::zeros(grid))
            .collect();
        let velocities = (0..times.samples())
            .map(|_| VectorFieldGrid::zeros(grid))
            .collect();
        Self {
            grid,
            times,
            maps,
            velocities,
            inverses: OnceCell::new(),
        }
    }

    /// Build a path from displacement fields; velocities are recovered by
    /// central differences and the lift invariants are validated.
    pub fn from_displacements(
        grid: GridSpec,
        times: TimeGrid,
        maps: Vec<VectorFieldGrid>,
        params: &FlowParams,
    ) -> Result<Self> {
        if maps.len() != times.samples() {
            return Err(Error::TimeGridMismatch(format!(
                "{} displacement fields for {} samples",
                maps.len(),
                times.samples()
            )));
        }
        if maps[0].sup_norm() > 1e-9 {
            return Err(Error::LiftBroken {
                index: 0,
                jump: maps[0].sup_norm(),
            });
        }
        check_lift(&maps)?;
        let mut path = Self {
            grid,
            times,
            maps,
            velocities: Vec::new(),
            inverses: OnceCell::new(),
        };
        path.velocities = path.finite_difference_velocities(params)?;
        Ok(path)
    }

    /// Translation path θ ↦ θ + offset(t_k); `offsets[0]` must vanish.
    pub fn translations(grid: GridSpec, times: TimeGrid, offsets: &[Vec<f64>]) -> Result<Self> {
        if offsets.len() != times.samples() {
            return Err(Error::TimeGridMismatch(format!(
                "{} offsets for {} samples",
                offsets.len(),
                times.samples()
            )));
        }
        let maps: Vec<VectorFieldGrid> = offsets
            .iter()
            .map(|v| VectorFieldGrid::constant(grid, v))
            .collect::<Result<_>>()?;
        check_lift(&maps)?;
        // Eulerian velocity of a translation path is the time derivative of
        // the offset, constant in space.
        let d = grid.dim().ambient();
        let dt = times.dt();
        let m = times.samples();
        let velocities: Vec<VectorFieldGrid> = (0..m)
            .map(|k| {
                let mut v = vec![0.0; d];
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi = central_difference(|j| offsets[j][i], k, m, dt);
                }
                VectorFieldGrid::constant(grid, &v)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            grid,
            times,
            maps,
            velocities,
            inverses: OnceCell::new(),
        })
    }

    /// Per-time inverse displacement fields (lazy, shared).
    pub fn inverse_maps(&self, params: &FlowParams) -> Result<&[VectorFieldGrid]> {
        self.inverses
            .get_or_try_init(|| {
                let mut out = Vec::with_capacity(self.maps.len());
                let mut warm: Option<&VectorFieldGrid> = None;
                for (k, d) in self.maps.iter().enumerate() {
                    let inv = invert_slice(d, params, warm).map_err(|e| match e {
                        Error::NoConvergence { iters, residual } => {
                            let _ = k;
                            Error::NoConvergence { iters, residual }
                        }
                        other => other,
                    })?;
                    out.push(inv);
                    warm = out.last();
                }
                Ok(out)
            })
            .map(|v| v.as_slice())
    }

    pub fn inverse_slice(&self, k: usize, params: &FlowParams) -> Result<TorusMap> {
        Ok(TorusMap::new(self.inverse_maps(params)?[k].clone()))
    }

    /// The inverse path t ↦ (φ_t)^{-1} with its own velocities.
    pub fn invert(&self, params: &FlowParams) -> Result<Isotopy> {
        let inv_maps = self.inverse_maps(params)?.to_vec();
        let lagr = lagrangian_velocities(&self.times, &inv_maps);
        // Eulerianize: the inverse of slice k of the inverse path is the
        // forward slice k, so sample the Lagrangian derivative there.
        let velocities = eulerianize(&lagr, &self.maps, params);
        Ok(Isotopy {
            grid: self.grid,
            times: self.times,
            maps: inv_maps,
            velocities,
            inverses: OnceCell::with_value(self.maps.clone()),
        })
    }

    /// Volume-preservation diagnostic: max over t and sampled cells of
    /// |det(Dφ_t) − 1| with the Jacobian from spectral derivatives.
    pub fn volume_defect(&self) -> f64 {
        let d = self.grid.dim().ambient();
        let len = self.grid.len();
        let mut worst = 0.0f64;
        for dispk in &self.maps {
            let jac = jacobians(dispk, d);
            let m = par::max_indexed(len, |idx| {
                let mut a = vec![0.0; d * d];
                for i in 0..d {
                    for j in 0..d {
                        a[i * d + j] = jac[i * d + j][idx] + if i == j { 1.0 } else { 0.0 };
                    }
                }
                (det_in_place(&mut a, d) - 1.0).abs()
            });
            worst = worst.max(m);
        }
        worst
    }

    /// Symplecticity defect: max over t and the grid of the entries of
    /// Dφ_tᵀ Ω Dφ_t − Ω, with the Jacobian from spectral derivatives of the
    /// periodic displacement. Exact up to time discretization for smooth
    /// maps, so it cleanly separates non-symplectic paths from
    /// interpolation noise.
    pub fn symplecticity_defect(&self) -> f64 {
        let d = self.grid.dim().ambient();
        let n = d / 2;
        let len = self.grid.len();
        let mut worst = 0.0f64;
        for dispk in &self.maps {
            let jac = jacobians(dispk, d);
            let m = par::max_indexed(len, |idx| {
                let mut a = vec![0.0; d * d];
                for i in 0..d {
                    for j in 0..d {
                        a[i * d + j] = jac[i * d + j][idx] + if i == j { 1.0 } else { 0.0 };
                    }
                }
                // (JᵀΩJ)_{pq} = Σ_i J_{i,p} J_{i+n,q} − J_{i+n,p} J_{i,q}
                let mut defect = 0.0f64;
                for p in 0..d {
                    for q in 0..d {
                        let mut acc = 0.0;
                        for i in 0..n {
                            acc += a[i * d + p] * a[(i + n) * d + q]
                                - a[(i + n) * d + p] * a[i * d + q];
                        }
                        let omega_pq = if q == p + n {
                            1.0
                        } else if p == q + n {
                            -1.0
                        } else {
                            0.0
                        };
                        defect = defect.max((acc - omega_pq).abs());
                    }
                }
                defect
            });
            worst = worst.max(m);
        }
        worst
    }

    fn finite_difference_velocities(&self, params: &FlowParams) -> Result<Vec<VectorFieldGrid>> {
        let lagr = lagrangian_velocities(&self.times, &self.maps);
        let inv = self.inverse_maps(params)?;
        Ok(eulerianize(&lagr, inv, params))
    }
}

fn check_lift(maps: &[VectorFieldGrid]) -> Result<()> {
    for (k, w) in maps.windows(2).enumerate() {
        let jump = max_component_jump(&w[0], &w[1]);
        if jump >= 0.5 {
            return Err(Error::LiftBroken {
                index: k + 1,
                jump,
            });
        }
    }
    Ok(())
}

fn max_component_jump(a: &VectorFieldGrid, b: &VectorFieldGrid) -> f64 {
    let len = a.grid().len();
    let d = a.grid().dim().ambient();
    par::max_indexed(len, |idx| {
        let mut m = 0.0f64;
        for i in 0..d {
            m = m.max((a.component(i).values()[idx] - b.component(i).values()[idx]).abs());
        }
        m
    })
}

/// ∂_j disp_i as flat value arrays, row-major in (i, j).
fn jacobians(disp: &VectorFieldGrid, d: usize) -> Vec<Vec<f64>> {
    let mut jac: Vec<Vec<f64>> = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            jac.push(crate::spectral::derivative(disp.component(i), j).into_values());
        }
    }
    jac
}

/// Gaussian elimination determinant for the tiny Jacobian blocks.
fn det_in_place(a: &mut [f64], d: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..d {
        let mut pivot = col;
        for row in col + 1..d {
            if a[row * d + col].abs() > a[pivot * d + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * d + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..d {
                a.swap(col * d + j, pivot * d + j);
            }
            det = -det;
        }
        let p = a[col * d + col];
        det *= p;
        for row in col + 1..d {
            let f = a[row * d + col] / p;
            for j in col..d {
                a[row * d + j] -= f * a[col * d + j];
            }
        }
    }
    det
}

/// Second-order time derivative of a per-sample quantity.
fn central_difference(f: impl Fn(usize) -> f64, k: usize, samples: usize, dt: f64) -> f64 {
    if samples == 2 {
        return (f(1) - f(0)) / dt;
    }
    if k == 0 {
        (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * dt)
    } else if k == samples - 1 {
        (3.0 * f(k) - 4.0 * f(k - 1) + f(k - 2)) / (2.0 * dt)
    } else {
        (f(k + 1) - f(k - 1)) / (2.0 * dt)
    }
}

/// Per-sample Lagrangian velocity fields d/dt φ_t(x) on the grid labels.
fn lagrangian_velocities(times: &TimeGrid, maps: &[VectorFieldGrid]) -> Vec<VectorFieldGrid> {
    let m = times.samples();
    let dt = times.dt();
    let grid = *maps[0].grid();
    let d = grid.dim().ambient();
    par::map_indexed(m, |k| {
        let comps: Vec<ScalarField> = (0..d)
            .map(|i| {
                let vals = par::map_indexed(grid.len(), |idx| {
                    central_difference(|j| maps[j].component(i).values()[idx], k, m, dt)
                });
                ScalarField::from_values(grid, vals).expect("grid size")
            })
            .collect();
        VectorFieldGrid::new(comps).expect("component count")
    })
}

/// Turn Lagrangian velocities into Eulerian fields by sampling at the
/// preimages: V_k(y) = L_k(χ_k^{-1}(y)), with χ_k^{-1} given by `inv`.
fn eulerianize(
    lagr: &[VectorFieldGrid],
    inv: &[VectorFieldGrid],
    params: &FlowParams,
) -> Vec<VectorFieldGrid> {
    par::map_indexed(lagr.len(), |k| compose_field(&lagr[k], &inv[k], params.interp))
}

/// Sample every component of `field` at x + disp(x) over the grid.
pub fn compose_field(
    field: &VectorFieldGrid,
    disp: &VectorFieldGrid,
    method: InterpMethod,
) -> VectorFieldGrid {
    let grid = *field.grid();
    let d = grid.dim().ambient();
    let comps: Vec<ScalarField> = (0..d)
        .map(|i| compose_scalar(field.component(i), disp, method))
        .collect();
    VectorFieldGrid::new(comps).expect("component count")
}

/// Sample a scalar field at x + disp(x) over the grid: F ∘ χ for the map χ
/// with displacement `disp`.
pub fn compose_scalar(
    field: &ScalarField,
    disp: &VectorFieldGrid,
    method: InterpMethod,
) -> ScalarField {
    let grid = *field.grid();
    let d = grid.dim().ambient();
    let mut out = ScalarField::zeros(grid);
    let values = out.values_mut();
    par::for_each_indexed(values, |idx, v| {
        let mut pos = [0.0f64; 8];
        grid.coords(idx, &mut pos[..d]);
        for i in 0..d {
            pos[i] += disp.component(i).values()[idx];
        }
        *v = interp::eval_scalar(field, &pos[..d], method);
    });
    out
}

/// Solve for the inverse displacement of one slice: e(y) = −d(y + e(y)),
/// damped fixed point, warm-started from the previous time sample.
pub fn invert_slice(
    disp: &VectorFieldGrid,
    params: &FlowParams,
    warm: Option<&VectorFieldGrid>,
) -> Result<VectorFieldGrid> {
    let grid = *disp.grid();
    let d = grid.dim().ambient();
    let len = grid.len();
    let mut e: Vec<Vec<f64>> = match warm {
        Some(w) => (0..d).map(|i| w.component(i).values().to_vec()).collect(),
        None => (0..d).map(|_| vec![0.0; len]).collect(),
    };

    let mut damping = params.inverse_damping;
    let mut residual = f64::INFINITY;
    let mut prev_residual = f64::INFINITY;
    for _ in 0..params.inverse_max_iters {
        // Flatten point-major for one parallel sweep.
        let mut updates = vec![0.0f64; len * d];
        {
            let e_ref = &e;
            par::for_each_chunk(&mut updates, d, |idx, chunk| {
                let mut pos = [0.0f64; 8];
                grid.coords(idx, &mut pos[..d]);
                for i in 0..d {
                    pos[i] += e_ref[i][idx];
                }
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = -interp::eval_scalar(disp.component(i), &pos[..d], params.interp);
                }
            });
        }
        residual = 0.0;
        for i in 0..d {
            for idx in 0..len {
                let target = updates[idx * d + i];
                let delta = target - e[i][idx];
                residual = residual.max(delta.abs());
                e[i][idx] += damping * delta;
            }
        }
        if residual <= params.inverse_tol {
            let comps = e
                .into_iter()
                .map(|v| ScalarField::from_values(grid, v).expect("grid size"))
                .collect();
            return VectorFieldGrid::new(comps);
        }
        // a non-decreasing residual means the undamped map cycles across the
        // kinks of the interpolant; more damping restores the contraction
        if residual >= prev_residual {
            damping = (0.5 * damping).max(0.3);
        }
        prev_residual = residual;
    }
    Err(Error::NoConvergence {
        iters: params.inverse_max_iters,
        residual,
    })
}

/// Integrate the flow of a generator: dφ_t/dt = Z_t ∘ φ_t with
/// Z_t = (dU_t + H_t)^♯, classical RK4 with the sampled fields blended
/// linearly in time inside each step.
pub fn integrate(g: &Generator, params: &FlowParams) -> Result<Isotopy> {
    let grid = *g.grid();
    let times = *g.times();
    let d = grid.dim().ambient();
    let len = grid.len();
    let m = times.samples();

    // Eulerian velocity fields at the sample times.
    let velocities: Vec<VectorFieldGrid> = par::map_indexed(m, |k| {
        let mut alpha = hodge::exterior_d(g.ham(k));
        let hconst =
            crate::field::OneFormField::from_harmonic(grid, g.harm(k)).expect("matched dims");
        alpha = alpha.add(&hconst).expect("same grid");
        symplectic::sharp(&alpha)
    });

    // Base coordinates, point-major.
    let mut base = vec![0.0f64; len * d];
    for idx in 0..len {
        grid.coords(idx, &mut base[idx * d..(idx + 1) * d]);
    }
    let mut pos = base.clone();

    let mut maps: Vec<VectorFieldGrid> = Vec::with_capacity(m);
    maps.push(VectorFieldGrid::zeros(grid));

    let sub = params.substeps.max(1);
    let h = times.dt() / sub as f64;

    for k in 0..m - 1 {
        for j in 0..sub {
            let th0 = j as f64 / sub as f64;
            let th1 = (j as f64 + 0.5) / sub as f64;
            let th2 = (j + 1) as f64 / sub as f64;
            let f0 = blend(&velocities[k], &velocities[k + 1], th0);
            let fm = blend(&velocities[k], &velocities[k + 1], th1);
            let f1 = blend(&velocities[k], &velocities[k + 1], th2);
            rk4_step(&mut pos, d, h, &f0, &fm, &f1, params.interp);
        }
        // Displacement field for this sample.
        let mut comps: Vec<ScalarField> = Vec::with_capacity(d);
        for i in 0..d {
            let vals = par::map_indexed(len, |idx| pos[idx * d + i] - base[idx * d + i]);
            comps.push(ScalarField::from_values(grid, vals)?);
        }
        let dispk = VectorFieldGrid::new(comps)?;
        let jump = max_component_jump(maps.last().expect("nonempty"), &dispk);
        if jump >= 0.5 {
            return Err(Error::StepUnstable { index: k + 1, jump });
        }
        maps.push(dispk);
    }

    Ok(Isotopy {
        grid,
        times,
        maps,
        velocities,
        inverses: OnceCell::new(),
    })
}

fn blend(a: &VectorFieldGrid, b: &VectorFieldGrid, theta: f64) -> VectorFieldGrid {
    if theta == 0.0 {
        a.clone()
    } else if theta == 1.0 {
        b.clone()
    } else {
        a.scale(1.0 - theta)
            .add(&b.scale(theta))
            .expect("same grid")
    }
}

fn rk4_step(
    pos: &mut [f64],
    d: usize,
    h: f64,
    f0: &VectorFieldGrid,
    fm: &VectorFieldGrid,
    f1: &VectorFieldGrid,
    method: InterpMethod,
) {
    par::for_each_chunk(pos, d, |_, p| {
        let mut k1 = [0.0f64; 8];
        let mut k2 = [0.0f64; 8];
        let mut k3 = [0.0f64; 8];
        let mut k4 = [0.0f64; 8];
        let mut q = [0.0f64; 8];

        for i in 0..d {
            k1[i] = interp::eval_scalar(f0.component(i), p, method);
        }
        for i in 0..d {
            q[i] = p[i] + 0.5 * h * k1[i];
        }
        for i in 0..d {
            k2[i] = interp::eval_scalar(fm.component(i), &q[..d], method);
        }
        for i in 0..d {
            q[i] = p[i] + 0.5 * h * k2[i];
        }
        for i in 0..d {
            k3[i] = interp::eval_scalar(fm.component(i), &q[..d], method);
        }
        for i in 0..d {
            q[i] = p[i] + h * k3[i];
        }
        for i in 0..d {
            k4[i] = interp::eval_scalar(f1.component(i), &q[..d], method);
        }
        for i in 0..d {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    });
}

/// Interpolated composition (φ ∘ ψ)_t = φ_t ∘ ψ_t with a consistent lift.
pub fn compose(phi: &Isotopy, psi: &Isotopy, params: &FlowParams) -> Result<Isotopy> {
    phi.grid.check_same(&psi.grid)?;
    phi.times.check_same(&psi.times)?;
    let maps: Vec<VectorFieldGrid> = par::map_indexed(phi.times.samples(), |k| {
        compose_displacements(&phi.maps[k], &psi.maps[k], params.interp)
    });
    Isotopy::from_displacements(phi.grid, phi.times, maps, params)
}

/// Displacement of χ = φ ∘ ψ from the displacements of φ and ψ.
pub fn compose_displacements(
    phi: &VectorFieldGrid,
    psi: &VectorFieldGrid,
    method: InterpMethod,
) -> VectorFieldGrid {
    let outer = compose_field(phi, psi, method);
    psi.add(&outer).expect("same grid")
}

/// Recover the generator of a path: central-difference velocities pulled
/// back to Eulerian fields, then ι(Z_t)ω = dU_t + H_t per time sample.
///
/// The closedness of ι(Z_t)ω is exactly symplecticity of the path, and is
/// gated on the interpolation-free Jacobian defect — the antisymmetrized
/// derivative of the interpolated velocity fields would drown the signal in
/// high-frequency interpolation noise. This route is independent of the
/// velocity cache, so `generator_of(integrate(g)) ≈ g` is a genuine
/// round-trip check.
pub fn generator_of(phi: &Isotopy, params: &FlowParams, hodge: &HodgeParams) -> Result<Generator> {
    if phi.times.samples() < 3 {
        return Err(Error::InvalidParameter(
            "generator recovery needs at least 3 time samples".into(),
        ));
    }
    let defect = phi.symplecticity_defect();
    if defect > hodge.symplectic_tol {
        return Err(Error::NotClosed {
            residual: defect,
            tol: hodge.symplectic_tol,
        });
    }
    let lagr = lagrangian_velocities(&phi.times, &phi.maps);
    let inv = phi.inverse_maps(params)?;
    let eul = eulerianize(&lagr, inv, params);

    let mut hams = Vec::with_capacity(eul.len());
    let mut harms = Vec::with_capacity(eul.len());
    for z in &eul {
        let split = hodge::decompose_unchecked(&symplectic::flat(z));
        hams.push(split.potential.normalized());
        harms.push(split.harmonic);
    }
    Generator::new(phi.grid, phi.times, hams, harms)
}

/// The shifted path t ↦ φ_{t+s} ∘ (φ_s)^{-1} on [0, 1−s]; `s` must lie on
/// the time grid. Its generator is the index-shifted generator.
pub fn time_shift(phi: &Isotopy, s: f64, params: &FlowParams) -> Result<Isotopy> {
    let j = phi.times.index_of(s)?;
    let m = phi.times.samples();
    if j == m - 1 {
        return Err(Error::InvalidParameter(
            "shift by the full interval leaves no path".into(),
        ));
    }
    if j == 0 {
        return Ok(phi.clone());
    }
    let inv_j = &phi.inverse_maps(params)?[j];
    let maps: Vec<VectorFieldGrid> = par::map_indexed(m - j, |k| {
        let comp = compose_displacements(&phi.maps[k + j], inv_j, params.interp);
        // anchor the lift at zero at the new start
        if k == 0 {
            VectorFieldGrid::zeros(phi.grid)
        } else {
            comp
        }
    });
    let times = TimeGrid::new(m - j, phi.times.t_end() - s)?;
    Isotopy::from_displacements(phi.grid, times, maps, params)
}

/// The C⁰ metrics of two paths: time-one d_{C⁰} forward and inverse,
/// d₀ = max of the two, and d̄ = max over t of the per-slice d₀.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathDistanceReport {
    pub d_c0_forward: f64,
    pub d_c0_inverse: f64,
    pub d0: f64,
    pub dbar: f64,
}

pub fn path_distance(phi: &Isotopy, psi: &Isotopy, params: &FlowParams) -> Result<PathDistanceReport> {
    phi.grid.check_same(&psi.grid)?;
    phi.times.check_same(&psi.times)?;
    let inv_phi = phi.inverse_maps(params)?;
    let inv_psi = psi.inverse_maps(params)?;
    let m = phi.times.samples();

    let mut dbar = 0.0f64;
    let mut last_fwd = 0.0;
    let mut last_inv = 0.0;
    for k in 0..m {
        let fwd = TorusMap::new(phi.maps[k].clone())
            .c0_distance(&TorusMap::new(psi.maps[k].clone()))?;
        let inv = TorusMap::new(inv_phi[k].clone())
            .c0_distance(&TorusMap::new(inv_psi[k].clone()))?;
        dbar = dbar.max(fwd.max(inv));
        if k == m - 1 {
            last_fwd = fwd;
            last_inv = inv;
        }
    }
    Ok(PathDistanceReport {
        d_c0_forward: last_fwd,
        d_c0_inverse: last_inv,
        d0: last_fwd.max(last_inv),
        dbar,
    })
}

/// d̄ distance of a path to the constant identity path.
pub fn dbar_to_identity(phi: &Isotopy, params: &FlowParams) -> Result<f64> {
    let id = Isotopy::identity(phi.grid, phi.times);
    Ok(path_distance(phi, &id, params)?.dbar)
}

/// One-parameter-group diagnostics: the group defect
/// max d₀(φ_{t+s}, φ_t ∘ φ_s) over grid-compatible pairs, and the autonomy
/// defect max_t ‖X_t − X_0‖ of the recovered generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OneParamReport {
    pub group_defect: f64,
    pub autonomy_defect: f64,
    pub pairs_checked: usize,
}

pub fn one_param_group_check(
    phi: &Isotopy,
    params: &FlowParams,
    hodge: &HodgeParams,
    stride: usize,
) -> Result<OneParamReport> {
    let m = phi.times.samples();
    let stride = stride.max(1);
    let inv = phi.inverse_maps(params)?;

    let mut group_defect = 0.0f64;
    let mut pairs = 0usize;
    for i in (stride..m).step_by(stride) {
        for j in (stride..m).step_by(stride) {
            if i + j >= m {
                break;
            }
            let composed = compose_displacements(&phi.maps[i], &phi.maps[j], params.interp);
            let fwd = TorusMap::new(composed.clone())
                .c0_distance(&TorusMap::new(phi.maps[i + j].clone()))?;
            // inverse side: (φ_i ∘ φ_j)^{-1} = φ_j^{-1} ∘ φ_i^{-1}
            let inv_comp = compose_displacements(&inv[j], &inv[i], params.interp);
            let bwd = TorusMap::new(inv_comp)
                .c0_distance(&TorusMap::new(inv[i + j].clone()))?;
            group_defect = group_defect.max(fwd.max(bwd));
            pairs += 1;
        }
    }

    let gen = generator_of(phi, params, hodge)?;
    let mut autonomy = 0.0f64;
    for k in 0..m {
        let du = gen.ham(k).sub(gen.ham(0))?;
        let dh = gen.harm(k).sub(gen.harm(0));
        autonomy = autonomy.max(du.osc() + dh.norm());
    }

    Ok(OneParamReport {
        group_defect,
        autonomy_defect: autonomy,
        pairs_checked: pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::Params;
    use crate::grid::TorusDim;
    use crate::scenarios::{build_rotation, RotationSpec};
    use std::f64::consts::TAU;

    fn grid(n: usize, pts: usize) -> GridSpec {
        GridSpec::new(TorusDim::new(n).unwrap(), pts).unwrap()
    }

    fn unit_times(steps: usize) -> TimeGrid {
        TimeGrid::unit(steps).unwrap()
    }

    #[test]
    fn zero_generator_integrates_to_identity() {
        let g = grid(1, 16);
        let times = unit_times(20);
        let gen = Generator::zero(g, times);
        let phi = integrate(&gen, &FlowParams::default()).unwrap();
        for k in 0..times.samples() {
            assert!(phi.maps()[k].sup_norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_generator_integrates_to_translations() {
        let g = grid(1, 16);
        let times = unit_times(40);
        let v = [0.3, 0.4];
        let gen = build_rotation(&RotationSpec::new(v.to_vec()), g, times).unwrap();
        let phi = integrate(&gen, &FlowParams::default()).unwrap();
        for k in [0, 10, 40] {
            let t = times.time(k);
            for i in 0..2 {
                let err = phi.maps()[k]
                    .component(i)
                    .sub(&ScalarField::constant(g, t * v[i]))
                    .unwrap()
                    .sup_norm();
                assert!(err < 1e-12, "k={k} i={i} err={err}");
            }
        }
    }

    #[test]
    fn hamiltonian_shear_flow_matches_closed_form() {
        // U = sin(2πθ1)/2π: X_U = -cos(2πθ1) ∂θ2, so
        // φ_t(x, y) = (x, y − t cos(2πx)) exactly.
        let g = grid(1, 32);
        let times = unit_times(50);
        let u = ScalarField::from_fn(g, |c| (TAU * c[0]).sin() / TAU);
        let gen = Generator::hamiltonian(g, times, |_, _| u.clone()).unwrap();
        let phi = integrate(&gen, &FlowParams::default()).unwrap();
        let k = 50;
        let expect = ScalarField::from_fn(g, |c| -(TAU * c[0]).cos());
        let err0 = phi.maps()[k].component(0).sup_norm();
        let err1 = phi.maps()[k]
            .component(1)
            .sub(&expect)
            .unwrap()
            .sup_norm();
        assert!(err0 < 1e-10, "x drift {err0}");
        assert!(err1 < 1e-8, "y error {err1}");
    }

    #[test]
    fn generator_round_trip_on_hamiltonian_flow() {
        let g = grid(1, 32);
        let times = unit_times(200);
        let u = ScalarField::from_fn(g, |c| (TAU * c[0]).sin() / TAU);
        let gen = Generator::hamiltonian(g, times, |_, _| u.clone()).unwrap();
        let phi = integrate(&gen, &FlowParams::default()).unwrap();
        let rec = generator_of(&phi, &FlowParams::default(), &HodgeParams::default()).unwrap();
        let mut worst = 0.0f64;
        for k in 0..times.samples() {
            let du = rec.ham(k).sub(gen.ham(k)).unwrap().sup_norm();
            let dh = rec.harm(k).sub(gen.harm(k)).norm();
            worst = worst.max(du + dh);
        }
        assert!(worst < 1e-3, "round trip error {worst}");
    }

    #[test]
    fn translations_recover_constant_generator() {
        let g = grid(1, 16);
        let times = unit_times(60);
        let v = [0.2, -0.1];
        let offsets: Vec<Vec<f64>> = (0..times.samples())
            .map(|k| vec![times.time(k) * v[0], times.time(k) * v[1]])
            .collect();
        let phi = Isotopy::translations(g, times, &offsets).unwrap();
        let rec = generator_of(&phi, &FlowParams::default(), &HodgeParams::default()).unwrap();
        let expect = symplectic::flat_constant(&v).unwrap();
        for k in [0, 30, 60] {
            assert!(rec.ham(k).sup_norm() < 1e-10);
            assert!(rec.harm(k).sub(&expect).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_of_translation_is_opposite_translation() {
        let g = grid(1, 16);
        let times = unit_times(20);
        let v = [0.25, 0.1];
        let offsets: Vec<Vec<f64>> = (0..times.samples())
            .map(|k| vec![times.time(k) * v[0], times.time(k) * v[1]])
            .collect();
        let phi = Isotopy::translations(g, times, &offsets).unwrap();
        let inv = phi.invert(&FlowParams::default()).unwrap();
        for k in [5, 20] {
            let t = times.time(k);
            for i in 0..2 {
                let err = inv.maps()[k]
                    .component(i)
                    .sub(&ScalarField::constant(g, -t * v[i]))
                    .unwrap()
                    .sup_norm();
                assert!(err < 1e-10);
            }
        }
    }

    #[test]
    fn forward_then_inverse_is_identity_on_grid() {
        let g = grid(1, 32);
        let times = unit_times(50);
        let u = ScalarField::from_fn(g, |c| 0.01 * (TAU * c[0]).sin() * (TAU * c[1]).cos());
        let gen = Generator::hamiltonian(g, times, |_, _| u.clone()).unwrap();
        let phi = integrate(&gen, &FlowParams::default()).unwrap();
        let psi = phi.invert(&FlowParams::default()).unwrap();
        let id = compose(&phi, &psi, &FlowParams::default()).unwrap();
        let mut worst = 0.0f64;
        for k in 0..times.samples() {
            worst = worst.max(TorusMap::new(id.maps()[k].clone()).c0_norm());
        }
        assert!(worst < 1e-6, "φ∘φ⁻¹ defect {worst}");
    }

    #[test]
    fn inverse_then_forward_is_identity_within_interpolation_accuracy() {
        // ψ∘φ evaluates the inverse displacement off the grid, so the defect
        // is governed by interpolation; cubic at N = 128 with a small
        // band-limited Hamiltonian keeps it below 1e-6.
        let g = grid(1, 128);
        let times = unit_times(40);
        let params = FlowParams {
            interp: InterpMethod::Cubic,
            ..FlowParams::default()
        };
        let u = ScalarField::from_fn(g, |c| {
            0.05 * ((TAU * c[0]).sin() + (TAU * c[1]).cos()) / TAU
        });
        let gen = Generator::hamiltonian(g, times, |_, _| u.clone()).unwrap();
        let phi = integrate(&gen, &params).unwrap();
        let psi = phi.invert(&params).unwrap();
        let id = compose(&psi, &phi, &params).unwrap();
        let worst = TorusMap::new(id.maps()[times.samples() - 1].clone()).c0_norm();
        assert!(worst < 1e-6, "φ⁻¹∘φ defect {worst}");
    }

    #[test]
    fn compose_translations_adds_offsets() {
        let g = grid(1, 16);
        let times = unit_times(10);
        let mk = |v: [f64; 2]| {
            let offsets: Vec<Vec<f64>> = (0..times.samples())
                .map(|k| vec![times.time(k) * v[0], times.time(k) * v[1]])
                .collect();
            Isotopy::translations(g, times, &offsets).unwrap()
        };
        let a = mk([0.2, 0.0]);
        let b = mk([0.1, 0.15]);
        let c = compose(&a, &b, &FlowParams::default()).unwrap();
        let k = 10;
        for (i, want) in [0.3, 0.15].iter().enumerate() {
            let err = c.maps()[k]
                .component(i)
                .sub(&ScalarField::constant(g, *want))
                .unwrap()
                .sup_norm();
            assert!(err < 1e-12);
        }
        // compose with identity is identity on the other factor
        let id = Isotopy::identity(g, times);
        let same = compose(&a, &id, &FlowParams::default()).unwrap();
        for k in 0..times.samples() {
            let err = same.maps()[k]
                .component(0)
                .sub(a.maps()[k].component(0))
                .unwrap()
                .sup_norm();
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn path_distance_between_translations() {
        let g = grid(1, 32);
        let times = unit_times(20);
        let mk = |v: [f64; 2]| {
            let offsets: Vec<Vec<f64>> = (0..times.samples())
                .map(|k| vec![times.time(k) * v[0], times.time(k) * v[1]])
                .collect();
            Isotopy::translations(g, times, &offsets).unwrap()
        };
        let a = mk([0.3, 0.0]);
        let b = mk([0.1, 0.0]);
        let rep = path_distance(&a, &b, &FlowParams::default()).unwrap();
        // min-image norm of t(v−w) is maximal at t = 1 here
        assert!((rep.dbar - 0.2).abs() < 1e-12);
        assert!((rep.d0 - 0.2).abs() < 1e-12);
        let same = path_distance(&a, &a, &FlowParams::default()).unwrap();
        assert_eq!(same.dbar, 0.0);
    }

    #[test]
    fn time_shift_of_autonomous_flow_restricts_the_path() {
        let g = grid(1, 16);
        let times = unit_times(40);
        let v = [0.3, 0.1];
        let gen = build_rotation(&RotationSpec::new(v.to_vec()), g, times).unwrap();
        let phi = integrate(&gen, &FlowParams::default()).unwrap();
        let shifted = time_shift(&phi, 0.25, &FlowParams::default()).unwrap();
        assert_eq!(shifted.times().samples(), 31);
        // 1-parameter group: shifted path equals the path on [0, 0.75]
        for k in [0, 15, 30] {
            let err = shifted.maps()[k]
                .component(0)
                .sub(phi.maps()[k].component(0))
                .unwrap()
                .sup_norm();
            assert!(err < 1e-10, "k={k} err={err}");
        }
    }

    #[test]
    fn time_shift_matches_index_shifted_generator() {
        let g = grid(1, 32);
        let times = unit_times(200);
        // harmonic family sin(2πt) dθ1
        let gen = Generator::harmonic(g, times, |t| {
            crate::field::HarmonicForm::new(vec![(TAU * t).sin(), 0.0])
        })
        .unwrap();
        let phi = integrate(&gen, &FlowParams::default()).unwrap();
        let s = 0.25;
        let shifted = time_shift(&phi, s, &FlowParams::default()).unwrap();
        let rec = generator_of(&shifted, &FlowParams::default(), &HodgeParams::default()).unwrap();
        let mut worst = 0.0f64;
        for k in 0..shifted.times().samples() {
            let t = shifted.times().time(k);
            let expect = crate::field::HarmonicForm::new(vec![(TAU * (t + s)).sin(), 0.0]);
            worst = worst.max(rec.harm(k).sub(&expect).norm());
        }
        assert!(worst < 1e-3, "shifted harmonic family error {worst}");
    }

    #[test]
    fn volume_is_preserved_by_hamiltonian_flows() {
        // the defect measures spectral derivatives of the displacement, so
        // the field must stay resolved at N = 32: cubic trajectory
        // interpolation and a mild amplitude
        let g = grid(1, 32);
        let times = unit_times(200);
        let params = FlowParams {
            interp: InterpMethod::Cubic,
            ..FlowParams::default()
        };
        let u = ScalarField::from_fn(g, |c| 0.01 * (TAU * c[0]).sin() * (TAU * c[1]).sin());
        let gen = Generator::hamiltonian(g, times, |_, _| u.clone()).unwrap();
        let phi = integrate(&gen, &params).unwrap();
        assert!(phi.volume_defect() < 1e-3, "volume defect {}", phi.volume_defect());
        assert!(phi.symplecticity_defect() < 1e-3);
    }

    #[test]
    fn unstable_step_is_reported() {
        let g = grid(1, 8);
        let times = unit_times(2);
        let gen = build_rotation(&RotationSpec::new(vec![0.0, 2.0]), g, times).unwrap();
        let err = integrate(&gen, &FlowParams::default()).unwrap_err();
        assert!(matches!(err, Error::StepUnstable { .. }));
    }

    #[test]
    fn one_param_group_check_flags_time_dependence() {
        let p = Params::default();
        let g = grid(1, 16);
        let times = unit_times(100);
        // autonomous rotation: both defects tiny
        let rot = build_rotation(&RotationSpec::new(vec![0.3, 0.4]), g, times).unwrap();
        let phi = integrate(&rot, &p.flow).unwrap();
        let rep = one_param_group_check(&phi, &p.flow, &p.hodge, 10).unwrap();
        assert!(rep.group_defect < 1e-3, "group defect {}", rep.group_defect);
        assert!(rep.autonomy_defect < 1e-3);

        // H_t = sin(2πt) dθ1: large group defect
        let gen = Generator::harmonic(g, times, |t| {
            crate::field::HarmonicForm::new(vec![(TAU * t).sin(), 0.0])
        })
        .unwrap();
        let phi2 = integrate(&gen, &p.flow).unwrap();
        let rep2 = one_param_group_check(&phi2, &p.flow, &p.hodge, 10).unwrap();
        assert!(rep2.group_defect > 0.1, "group defect {}", rep2.group_defect);
    }
}
