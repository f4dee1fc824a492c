//! Grid-sampled fields on the torus and the harmonic 1-form space.
//!
//! On the flat torus the harmonic 1-forms are exactly the constant-coefficient
//! forms Σ λ^i dθ_i, so H¹(T^{2n}, g_0) is represented by the coefficient
//! vector λ ∈ R^{2n} with the norm |H| = Σ|λ^i|. The basis (dθ_i) has
//! E = max_i |dθ_i|_0 = 1, so no renormalization of the basis is needed and
//! |H|_0 ≤ |H| holds as stated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::par;

/// Constant-coefficient 1-form Σ λ^i dθ_i on T^{2n}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicForm {
    lambda: Vec<f64>,
}

impl HarmonicForm {
    pub fn new(lambda: Vec<f64>) -> Self {
        Self { lambda }
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            lambda: vec![0.0; ambient],
        }
    }

    /// Coefficient of dθ_i (0-based).
    pub fn coeff(&self, i: usize) -> f64 {
        self.lambda[i]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.lambda
    }

    pub fn ambient(&self) -> usize {
        self.lambda.len()
    }

    /// The norm |H| = Σ |λ^i| on the harmonic space.
    pub fn norm(&self) -> f64 {
        self.lambda.iter().map(|x| x.abs()).sum()
    }

    /// Pointwise operator norm |H|_0 w.r.t. g_0; constant over the torus.
    pub fn sup_norm(&self) -> f64 {
        self.lambda.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Evaluate on a tangent vector.
    pub fn pair(&self, v: &[f64]) -> f64 {
        self.lambda.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &HarmonicForm) -> HarmonicForm {
        HarmonicForm::new(
            self.lambda
                .iter()
                .zip(&other.lambda)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &HarmonicForm) -> HarmonicForm {
        HarmonicForm::new(
            self.lambda
                .iter()
                .zip(&other.lambda)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> HarmonicForm {
        HarmonicForm::new(self.lambda.iter().map(|a| a * c).collect())
    }
}

/// Real scalar field sampled on the uniform grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            values: vec![c; grid.len()],
            grid,
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "field has {} samples, grid wants {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Sample `f` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64 + Sync + Send) -> Self {
        let d = grid.dim().ambient();
        let values = par::map_indexed(grid.len(), |idx| {
            let mut c = vec![0.0; d];
            grid.coords(idx, &mut c);
            f(&c)
        });
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Grid mean; the discrete Liouville/Lebesgue average.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Oscillation osc(F) = max F − min F over the grid.
    pub fn osc(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi >= lo {
            hi - lo
        } else {
            0.0
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Subtract the grid mean; the discrete version of ∫ F ω^n = 0.
    /// Idempotent.
    pub fn normalized(&self) -> ScalarField {
        let m = self.mean();
        let mut out = self.clone();
        par::for_each_indexed(out.values_mut(), |_, v| *v -= m);
        out
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        par::for_each_indexed(out.values_mut(), |i, v| *v += other.values[i]);
        Ok(out)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.clone();
        par::for_each_indexed(out.values_mut(), |i, v| *v -= other.values[i]);
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        let mut out = self.clone();
        par::for_each_indexed(out.values_mut(), |_, v| *v *= c);
        out
    }
}

/// A bundle of 2n scalar fields sharing one grid. The meaning of the
/// components is fixed by the wrapper type: 1-form coefficients of dθ_i for
/// [`OneFormField`], vector components along ∂θ_i for [`VectorFieldGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentField {
    components: Vec<ScalarField>,
}

impl ComponentField {
    fn new(components: Vec<ScalarField>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::DimensionMismatch("no components".into()));
        }
        let grid = *components[0].grid();
        if components.len() != grid.dim().ambient() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for a {}-dimensional torus",
                components.len(),
                grid.dim().ambient()
            )));
        }
        for c in &components[1..] {
            grid.check_same(c.grid())?;
        }
        Ok(Self { components })
    }

    fn zeros(grid: GridSpec) -> Self {
        Self {
            components: (0..grid.dim().ambient())
                .map(|_| ScalarField::zeros(grid))
                .collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [ScalarField] {
        &mut self.components
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    /// Sup over the grid of the Euclidean norm of the component vector.
    pub fn sup_norm(&self) -> f64 {
        let len = self.grid().len();
        par::max_indexed(len, |idx| {
            self.components
                .iter()
                .map(|c| {
                    let v = c.values()[idx];
                    v * v
                })
                .sum::<f64>()
                .sqrt()
        })
    }

    /// Per-component grid means.
    pub fn component_means(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.mean()).collect()
    }

    fn add(&self, other: &ComponentField) -> Result<ComponentField> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        ComponentField::new(components)
    }

    fn sub(&self, other: &ComponentField) -> Result<ComponentField> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        ComponentField::new(components)
    }

    fn scale(&self, c: f64) -> ComponentField {
        ComponentField {
            components: self.components.iter().map(|f| f.scale(c)).collect(),
        }
    }
}

macro_rules! component_wrapper {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(pub(crate) ComponentField);

        impl $name {
            pub fn new(components: Vec<ScalarField>) -> Result<Self> {
                Ok(Self(ComponentField::new(components)?))
            }

            pub fn zeros(grid: GridSpec) -> Self {
                Self(ComponentField::zeros(grid))
            }

            pub fn grid(&self) -> &GridSpec {
                self.0.grid()
            }

            pub fn components(&self) -> &[ScalarField] {
                self.0.components()
            }

            pub fn components_mut(&mut self) -> &mut [ScalarField] {
                self.0.components_mut()
            }

            pub fn component(&self, i: usize) -> &ScalarField {
                self.0.component(i)
            }

            pub fn sup_norm(&self) -> f64 {
                self.0.sup_norm()
            }

            pub fn component_means(&self) -> Vec<f64> {
                self.0.component_means()
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                Ok(Self(self.0.add(&other.0)?))
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                Ok(Self(self.0.sub(&other.0)?))
            }

            pub fn scale(&self, c: f64) -> Self {
                Self(self.0.scale(c))
            }
        }
    };
}

component_wrapper!(
    /// Grid-sampled 1-form α = Σ α_i dθ_i; component i holds α_i.
    OneFormField
);

component_wrapper!(
    /// Grid-sampled vector field Z = Σ Z^i ∂θ_i; component i holds Z^i.
    VectorFieldGrid
);

impl OneFormField {
    /// The constant field of a harmonic form.
    pub fn from_harmonic(grid: GridSpec, h: &HarmonicForm) -> Result<Self> {
        if h.ambient() != grid.dim().ambient() {
            return Err(Error::DimensionMismatch(format!(
                "harmonic form has {} coefficients, torus has dimension {}",
                h.ambient(),
                grid.dim().ambient()
            )));
        }
        Self::new(
            h.coeffs()
                .iter()
                .map(|&c| ScalarField::constant(grid, c))
                .collect(),
        )
    }
}

impl VectorFieldGrid {
    /// The constant field θ ↦ v.
    pub fn constant(grid: GridSpec, v: &[f64]) -> Result<Self> {
        if v.len() != grid.dim().ambient() {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} entries, torus has dimension {}",
                v.len(),
                grid.dim().ambient()
            )));
        }
        Self::new(v.iter().map(|&c| ScalarField::constant(grid, c)).collect())
    }
}
