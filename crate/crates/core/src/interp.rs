//! Periodic grid interpolation.
//!
//! Multilinear is the default; cubic (Catmull-Rom tensor product) is the
//! higher-order knob used when composition accuracy matters. Both wrap
//! periodically in every axis, so interpolating a displacement field keeps
//! its continuous lift intact.

use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpMethod {
    #[default]
    Linear,
    Cubic,
}

/// Evaluate a scalar field at an arbitrary (unwrapped) position.
pub fn eval_scalar(field: &ScalarField, pos: &[f64], method: InterpMethod) -> f64 {
    eval_values(field.grid(), field.values(), pos, method)
}

/// Evaluate raw row-major sample values at a position.
pub fn eval_values(grid: &GridSpec, values: &[f64], pos: &[f64], method: InterpMethod) -> f64 {
    match method {
        InterpMethod::Linear => eval_linear(grid, values, pos),
        InterpMethod::Cubic => eval_cubic(grid, values, pos),
    }
}

fn eval_linear(grid: &GridSpec, values: &[f64], pos: &[f64]) -> f64 {
    let d = grid.dim().ambient();
    let n = grid.points_per_axis();
    debug_assert_eq!(pos.len(), d);

    // base index and fraction per axis
    let mut base = [0usize; 8];
    let mut frac = [0.0f64; 8];
    for a in 0..d {
        let x = pos[a].rem_euclid(1.0) * n as f64;
        let b = x.floor();
        base[a] = (b as usize) % n;
        frac[a] = x - b;
    }

    let corners = 1usize << d;
    let mut acc = 0.0;
    for c in 0..corners {
        let mut w = 1.0;
        let mut idx = 0usize;
        for a in 0..d {
            let hi = (c >> a) & 1 == 1;
            let i = if hi { (base[a] + 1) % n } else { base[a] };
            w *= if hi { frac[a] } else { 1.0 - frac[a] };
            idx = idx * n + i;
        }
        acc += w * values[idx];
    }
    acc
}

/// Catmull-Rom weights for fraction f ∈ [0,1), taps at offsets -1, 0, 1, 2.
fn catmull_rom(f: f64) -> [f64; 4] {
    let f2 = f * f;
    let f3 = f2 * f;
    [
        0.5 * (-f3 + 2.0 * f2 - f),
        0.5 * (3.0 * f3 - 5.0 * f2 + 2.0),
        0.5 * (-3.0 * f3 + 4.0 * f2 + f),
        0.5 * (f3 - f2),
    ]
}

fn eval_cubic(grid: &GridSpec, values: &[f64], pos: &[f64]) -> f64 {
    let d = grid.dim().ambient();
    let n = grid.points_per_axis();
    debug_assert_eq!(pos.len(), d);

    let mut taps = [[0usize; 4]; 8];
    let mut weights = [[0.0f64; 4]; 8];
    for a in 0..d {
        let x = pos[a].rem_euclid(1.0) * n as f64;
        let b = x.floor();
        let i0 = b as isize;
        let f = x - b;
        weights[a] = catmull_rom(f);
        for (t, tap) in taps[a].iter_mut().enumerate() {
            *tap = (i0 + t as isize - 1).rem_euclid(n as isize) as usize;
        }
    }

    // Tensor product over 4^d taps.
    let total = 4usize.pow(d as u32);
    let mut acc = 0.0;
    for c in 0..total {
        let mut w = 1.0;
        let mut idx = 0usize;
        let mut rest = c;
        for a in 0..d {
            let t = rest & 3;
            rest >>= 2;
            w *= weights[a][t];
            idx = idx * n + taps[a][t];
        }
        acc += w * values[idx];
    }
    acc
}
