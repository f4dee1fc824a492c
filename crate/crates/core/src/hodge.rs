//! Hodge decomposition of closed 1-form fields on the flat torus:
//! α = dU + H with U the zero-mean potential and H harmonic (constant
//! coefficients). The harmonic part is the per-component grid mean; the
//! potential solves the periodic Poisson problem ΔU = div(α − H) spectrally
//! with the zero mode pinned, which realizes δG on band-limited data exactly.

use crate::error::{Error, Result};
use crate::field::{HarmonicForm, OneFormField, ScalarField};
use crate::grid::GridSpec;
use crate::par;
use crate::spectral;

/// Default sup-norm tolerance on the antisymmetrized derivative ∂_i α_j −
/// ∂_j α_i; inputs come from spectral derivatives of smooth data, which are
/// closed to machine precision.
pub const DEFAULT_CLOSEDNESS_TOL: f64 = 1e-6;

/// Default gate on the symplecticity defect |Dφᵀ Ω Dφ − Ω| of a path whose
/// generator is being recovered. Integrated smooth flows sit near 1e-4 at
/// M = 200; visibly non-symplectic paths sit at O(0.1) and above.
pub const DEFAULT_SYMPLECTIC_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy)]
pub struct HodgeParams {
    /// gate for [`hodge_decompose`] on spectral-grade 1-form inputs
    pub closedness_tol: f64,
    /// gate for velocity recovery from sampled paths, measured as the
    /// Jacobian symplecticity defect (interpolation-free)
    pub symplectic_tol: f64,
}

impl Default for HodgeParams {
    fn default() -> Self {
        Self {
            closedness_tol: DEFAULT_CLOSEDNESS_TOL,
            symplectic_tol: DEFAULT_SYMPLECTIC_TOL,
        }
    }
}

/// Result of [`hodge_decompose`]: α = d(potential) + harmonic + O(residual).
#[derive(Debug, Clone)]
pub struct HodgeSplit {
    pub potential: ScalarField,
    pub harmonic: HarmonicForm,
    /// Sup-norm of α − dU − H over the grid.
    pub residual: f64,
}

/// Spectral gradient dF, one component per axis.
pub fn exterior_d(f: &ScalarField) -> OneFormField {
    let d = f.grid().dim().ambient();
    let spectrum = spectral::Spectrum::forward(f);
    let comps: Vec<ScalarField> = (0..d)
        .map(|axis| spectrum.derivative(axis).into_field())
        .collect();
    OneFormField::new(comps).expect("gradient has one component per axis")
}

/// Sup-norm of the antisymmetrized spectral derivative of α.
pub fn closedness_residual(alpha: &OneFormField) -> f64 {
    let d = alpha.grid().dim().ambient();
    let mut worst = 0.0f64;
    let spectra: Vec<_> = alpha
        .components()
        .iter()
        .map(spectral::Spectrum::forward)
        .collect();
    for i in 0..d {
        for j in (i + 1)..d {
            let dj_ai = spectra[i].derivative(j).into_field();
            let di_aj = spectra[j].derivative(i).into_field();
            let r = dj_ai.sub(&di_aj).expect("same grid").sup_norm();
            worst = worst.max(r);
        }
    }
    worst
}

/// Split a (numerically) closed 1-form into exact and harmonic parts.
///
/// Errors with [`Error::NotClosed`] when the closedness residual exceeds the
/// tolerance — the signal that the input is not the image of a symplectic
/// vector field.
pub fn hodge_decompose(alpha: &OneFormField, params: &HodgeParams) -> Result<HodgeSplit> {
    let residual = closedness_residual(alpha);
    if residual > params.closedness_tol {
        return Err(Error::NotClosed {
            residual,
            tol: params.closedness_tol,
        });
    }
    Ok(decompose_unchecked(alpha))
}

/// The split without the closedness gate; used internally where the input is
/// closed by construction.
pub fn decompose_unchecked(alpha: &OneFormField) -> HodgeSplit {
    let grid = *alpha.grid();
    let harmonic = HarmonicForm::new(alpha.component_means());
    let centered = subtract_harmonic(alpha, &harmonic);
    let div = spectral::divergence(&centered);
    let potential = spectral::poisson(&div);

    let grad = exterior_d(&potential);
    let residual = residual_sup(alpha, &grad, &harmonic, &grid);

    HodgeSplit {
        potential,
        harmonic,
        residual,
    }
}

fn subtract_harmonic(alpha: &OneFormField, h: &HarmonicForm) -> OneFormField {
    let mut out = alpha.clone();
    for (i, comp) in out.components_mut().iter_mut().enumerate() {
        let c = h.coeff(i);
        par::for_each_indexed(comp.values_mut(), |_, v| *v -= c);
    }
    out
}

fn residual_sup(
    alpha: &OneFormField,
    grad: &OneFormField,
    h: &HarmonicForm,
    grid: &GridSpec,
) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..grid.dim().ambient() {
        let c = h.coeff(i);
        let a = alpha.component(i).values();
        let g = grad.component(i).values();
        let m = par::max_indexed(grid.len(), |idx| (a[idx] - g[idx] - c).abs());
        worst = worst.max(m);
    }
    worst
}
