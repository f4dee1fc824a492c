//! Spectral calculus on the periodic grid: derivatives along axes and the
//! zero-mean Poisson solve that realizes the Green operator of the flat
//! torus. All transforms are full-dimensional complex FFTs over the N^{2n}
//! grid, axis by axis; plans are cached per length.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::field::{OneFormField, ScalarField};
use crate::grid::GridSpec;

struct PlanCache {
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

static PLANS: Lazy<Mutex<PlanCache>> = Lazy::new(|| {
    Mutex::new(PlanCache {
        forward: HashMap::new(),
        inverse: HashMap::new(),
    })
});

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLANS.lock().expect("fft plan cache");
    let map = if forward {
        &mut cache.forward
    } else {
        &mut cache.inverse
    };
    map.entry(len)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// Complex spectrum of a field, in the same row-major layout as the samples.
pub struct Spectrum {
    grid: GridSpec,
    data: Vec<Complex<f64>>,
}

impl Spectrum {
    pub fn forward(field: &ScalarField) -> Self {
        let grid = *field.grid();
        let mut data: Vec<Complex<f64>> = field
            .values()
            .iter()
            .map(|&v| Complex::new(v, 0.0))
            .collect();
        fft_all_axes(&mut data, &grid, true);
        Self { grid, data }
    }

    /// Inverse transform; the imaginary residue is dropped.
    pub fn into_field(mut self) -> ScalarField {
        fft_all_axes(&mut self.data, &self.grid, false);
        let scale = 1.0 / self.grid.len() as f64;
        let values = self.data.iter().map(|c| c.re * scale).collect();
        ScalarField::from_values(self.grid, values).expect("spectrum keeps grid size")
    }

    /// Multiply by the symbol of ∂/∂θ_axis, i.e. 2πi k_axis (Nyquist zeroed).
    pub fn derivative(&self, axis: usize) -> Spectrum {
        let mut out = Spectrum {
            grid: self.grid,
            data: self.data.clone(),
        };
        apply_symbol(&mut out.data, &self.grid, |k| {
            let ka = k[axis];
            Complex::new(0.0, TAU * ka)
        });
        out
    }

    /// Solve Δ U = self with the zero mode pinned to 0 (so U has zero mean).
    pub fn solve_poisson(&self) -> Spectrum {
        let mut out = Spectrum {
            grid: self.grid,
            data: self.data.clone(),
        };
        apply_symbol_replace(&mut out.data, &self.grid, |k, v| {
            let k2: f64 = k.iter().map(|&x| x * x).sum();
            if k2 == 0.0 {
                Complex::new(0.0, 0.0)
            } else {
                v / (-TAU * TAU * k2)
            }
        });
        out
    }
}

/// Signed frequency of sample index i on an axis of length n, with the
/// Nyquist mode mapped to 0 so odd-order symbols stay conjugate-symmetric.
fn signed_freq(i: usize, n: usize) -> f64 {
    let half = n / 2;
    if n.is_multiple_of(2) && i == half {
        0.0
    } else if i > half {
        i as f64 - n as f64
    } else {
        i as f64
    }
}

fn apply_symbol(
    data: &mut [Complex<f64>],
    grid: &GridSpec,
    symbol: impl Fn(&[f64]) -> Complex<f64>,
) {
    apply_symbol_replace(data, grid, |k, v| v * symbol(k));
}

fn apply_symbol_replace(
    data: &mut [Complex<f64>],
    grid: &GridSpec,
    f: impl Fn(&[f64], Complex<f64>) -> Complex<f64>,
) {
    let d = grid.dim().ambient();
    let n = grid.points_per_axis();
    let mut multi = vec![0usize; d];
    let mut k = vec![0.0f64; d];
    for (idx, v) in data.iter_mut().enumerate() {
        grid.multi_index(idx, &mut multi);
        for (a, &m) in multi.iter().enumerate() {
            k[a] = signed_freq(m, n);
        }
        *v = f(&k, *v);
    }
}

/// In-place FFT along every axis of the row-major hypercube.
fn fft_all_axes(data: &mut [Complex<f64>], grid: &GridSpec, forward: bool) {
    let d = grid.dim().ambient();
    let n = grid.points_per_axis();
    let total = grid.len();
    let fft = plan(n, forward);
    let mut lane = vec![Complex::new(0.0, 0.0); n];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    for axis in 0..d {
        // stride between consecutive samples along `axis`
        let stride = n.pow((d - 1 - axis) as u32);
        let lanes = total / n;
        for l in 0..lanes {
            // base index of lane l: distribute l over the other axes
            let outer = l / stride;
            let inner = l % stride;
            let base = outer * stride * n + inner;
            for (j, slot) in lane.iter_mut().enumerate() {
                *slot = data[base + j * stride];
            }
            fft.process_with_scratch(&mut lane, &mut scratch);
            for (j, slot) in lane.iter().enumerate() {
                data[base + j * stride] = *slot;
            }
        }
    }
}

/// Spectral partial derivative ∂F/∂θ_axis.
pub fn derivative(field: &ScalarField, axis: usize) -> ScalarField {
    Spectrum::forward(field).derivative(axis).into_field()
}

/// Divergence Σ ∂α_i/∂θ_i of a component bundle.
pub fn divergence(form: &OneFormField) -> ScalarField {
    let grid = *form.grid();
    let mut acc = ScalarField::zeros(grid);
    for (axis, comp) in form.components().iter().enumerate() {
        let d = derivative(comp, axis);
        acc = acc.add(&d).expect("same grid");
    }
    acc
}

/// Solve ΔU = rhs for the zero-mean potential U.
pub fn poisson(rhs: &ScalarField) -> ScalarField {
    Spectrum::forward(rhs).solve_poisson().into_field()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusDim;

    fn grid(n: usize, pts: usize) -> GridSpec {
        GridSpec::new(TorusDim::new(n).unwrap(), pts).unwrap()
    }

    #[test]
    fn derivative_of_sine_is_scaled_cosine() {
        let g = grid(1, 64);
        let f = ScalarField::from_fn(g, |c| (TAU * c[0]).sin());
        let df = derivative(&f, 0);
        let expect = ScalarField::from_fn(g, |c| TAU * (TAU * c[0]).cos());
        let err = df.sub(&expect).unwrap().sup_norm();
        assert!(err < 1e-10, "err = {err}");
        // d along the other axis vanishes
        assert!(derivative(&f, 1).sup_norm() < 1e-12);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = grid(1, 32);
        let f = ScalarField::constant(g, 4.0);
        assert!(derivative(&f, 0).sup_norm() < 1e-12);
    }

    #[test]
    fn mixed_partials_commute() {
        // d∘d = 0 at spectral accuracy, stated as symmetry of second derivatives.
        let g = grid(1, 32);
        let f = ScalarField::from_fn(g, |c| (TAU * c[0]).sin() * (TAU * 2.0 * c[1]).cos());
        let dxy = derivative(&derivative(&f, 0), 1);
        let dyx = derivative(&derivative(&f, 1), 0);
        assert!(dxy.sub(&dyx).unwrap().sup_norm() < 1e-9);
    }

    #[test]
    fn poisson_inverts_laplacian_on_band_limited_data() {
        let g = grid(1, 64);
        let u = ScalarField::from_fn(g, |c| {
            (TAU * c[0]).sin() + 0.5 * (TAU * 2.0 * c[1]).cos()
        });
        let lap = {
            let dxx = derivative(&derivative(&u, 0), 0);
            let dyy = derivative(&derivative(&u, 1), 1);
            dxx.add(&dyy).unwrap()
        };
        let back = poisson(&lap);
        let err = back.sub(&u.normalized()).unwrap().sup_norm();
        assert!(err < 1e-10, "err = {err}");
        assert!(back.mean().abs() < 1e-12);
    }

    #[test]
    fn four_dimensional_grid_round_trips() {
        let g = grid(2, 8);
        let f = ScalarField::from_fn(g, |c| {
            (TAU * c[0]).sin() * (TAU * c[3]).cos() + (TAU * c[2]).sin()
        });
        let round = Spectrum::forward(&f).into_field();
        assert!(round.sub(&f).unwrap().sup_norm() < 1e-12);
        let d3 = derivative(&f, 3);
        let expect = ScalarField::from_fn(g, |c| -TAU * (TAU * c[0]).sin() * (TAU * c[3]).sin());
        assert!(d3.sub(&expect).unwrap().sup_norm() < 1e-10);
    }
}
