//! Flat-torus geometry: dimensions, sample grids and time grids.
//!
//! The torus is T^{2n} = R^{2n}/Z^{2n} with coordinates (θ_1, …, θ_{2n}),
//! flat metric g_0 = Σ dθ_i², and the symplectic form ω = Σ_{i=1}^{n}
//! dθ_i ∧ dθ_{i+n}. Fields are sampled on a uniform grid with N points per
//! axis, row-major with axis 0 slowest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-dimension of the torus; the manifold dimension is `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusDim {
    n: usize,
}

impl TorusDim {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("half-dimension n must be ≥ 1".into()));
        }
        Ok(Self { n })
    }

    /// The `n` in T^{2n}.
    pub fn half(&self) -> usize {
        self.n
    }

    /// The manifold dimension 2n (= number of coordinates, = b_1).
    pub fn ambient(&self) -> usize {
        2 * self.n
    }
}

/// A point on the torus; every stored coordinate lies in [0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(mut coords: Vec<f64>) -> Self {
        for c in &mut coords {
            *c = wrap_unit(*c);
        }
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Toroidal (min-image) Euclidean distance to another point.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        toroidal_distance(&self.coords, &other.coords)
    }
}

/// Reduce a coordinate to [0, 1).
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed representative of `x` in [-1/2, 1/2).
pub fn wrap_signed(x: f64) -> f64 {
    let r = wrap_unit(x);
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Min-image Euclidean distance between coordinate vectors.
pub fn toroidal_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = wrap_signed(x - y);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Uniform periodic sample grid: `points_per_axis` samples along each of the
/// 2n axes, sample j at coordinate j/N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: TorusDim,
    points_per_axis: usize,
}

impl GridSpec {
    pub fn new(dim: TorusDim, points_per_axis: usize) -> Result<Self> {
        if points_per_axis < 2 {
            return Err(Error::InvalidParameter(
                "grid needs at least 2 points per axis".into(),
            ));
        }
        Ok(Self {
            dim,
            points_per_axis,
        })
    }

    pub fn dim(&self) -> TorusDim {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Grid spacing 1/N.
    pub fn cell(&self) -> f64 {
        1.0 / self.points_per_axis as f64
    }

    /// Total number of sample points N^{2n}.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim.ambient() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index of the flat index (axis 0 slowest).
    pub fn multi_index(&self, mut index: usize, out: &mut [usize]) {
        let n = self.points_per_axis;
        for slot in out.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
    }

    /// Flat index of a multi-index.
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        let n = self.points_per_axis;
        multi.iter().fold(0, |acc, &i| acc * n + i)
    }

    /// Coordinates of the sample with the given flat index.
    pub fn coords(&self, index: usize, out: &mut [f64]) {
        let n = self.points_per_axis;
        let h = self.cell();
        let mut idx = index;
        for slot in out.iter_mut().rev() {
            *slot = (idx % n) as f64 * h;
            idx /= n;
        }
    }

    pub fn point(&self, index: usize) -> TorusPoint {
        let mut c = vec![0.0; self.dim.ambient()];
        self.coords(index, &mut c);
        TorusPoint::new(c)
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch(format!(
                "grid {}^{} vs {}^{}",
                self.points_per_axis,
                self.dim.ambient(),
                other.points_per_axis,
                other.dim.ambient()
            )));
        }
        Ok(())
    }
}

/// Uniform time grid on [0, t_end] with `samples` points (so `samples - 1`
/// steps). Paths on [0,1] use t_end = 1; shifted paths use t_end = 1 - s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    samples: usize,
    t_end: f64,
}

impl TimeGrid {
    /// The standard grid: M steps on [0, 1], M + 1 samples.
    pub fn unit(steps: usize) -> Result<Self> {
        Self::new(steps + 1, 1.0)
    }

    pub fn new(samples: usize, t_end: f64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidParameter("time grid needs ≥ 2 samples".into()));
        }
        if !(t_end > 0.0) {
            return Err(Error::InvalidParameter("time grid needs t_end > 0".into()));
        }
        Ok(Self { samples, t_end })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn steps(&self) -> usize {
        self.samples - 1
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.t_end / (self.samples - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_end * k as f64 / (self.samples - 1) as f64
    }

    pub fn check_same(&self, other: &TimeGrid) -> Result<()> {
        if self.samples != other.samples || (self.t_end - other.t_end).abs() > 1e-12 {
            return Err(Error::TimeGridMismatch(format!(
                "{} samples on [0,{}] vs {} samples on [0,{}]",
                self.samples, self.t_end, other.samples, other.t_end
            )));
        }
        Ok(())
    }

    /// Index of a grid-aligned time, or an error if `t` is off-grid.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = t / self.dt();
        let k = x.round() as i64;
        if k < 0 || k as usize >= self.samples || (x - k as f64).abs() > 1e-9 {
            return Err(Error::OffGridShift(t));
        }
        Ok(k as usize)
    }
}

/// Trapezoid weights of the cumulative integral on a uniform grid: returns
/// the vector c with c[k] = ∫_0^{t_k} f dt for samples f[0..=steps].
pub fn cumulative_trapezoid(values: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Trapezoid integral over the whole grid.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    dt * (0.5 * values[0] + inner + 0.5 * values[values.len() - 1])
}
