//! Error type shared across the crate.

/// Errors produced by field operations, solvers and flow integration.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("time grids do not match: {0}")]
    TimeGridMismatch(String),

    #[error("1-form is not closed: antisymmetry residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotClosed { residual: f64, tol: f64 },

    #[error("time step unstable: displacement jump {jump:.3} at sample {index}; refine the time grid")]
    StepUnstable { index: usize, jump: f64 },

    #[error("lift continuity violated at sample {index}: jump {jump:.3}")]
    LiftBroken { index: usize, jump: f64 },

    #[error("inverse iteration did not converge: residual {residual:.3e} after {iters} iterations")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("flux is not zero: |flux| = {value:.3e} exceeds tolerance {tol:.3e}")]
    FluxNotZero { value: f64, tol: f64 },

    #[error("vector field is not harmonic: pointwise deviation {0:.3e} from the constant part")]
    NotHarmonic(f64),

    #[error("conjugator is not Hamiltonian: harmonic part has norm {0:.3e}")]
    NotHamiltonianConjugator(f64),

    #[error("no candidate isotopy matches the target time-one map")]
    NoValidCandidate,

    #[error("no candidate displaces the region")]
    NoDisplacer,

    #[error("shift time {0} is not on the time grid")]
    OffGridShift(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
