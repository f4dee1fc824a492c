//! A numerical laboratory for symplectic isotopies on the flat torus T^{2n}.
//!
//! The crate works with the symplectic form ω = Σ dθ_i ∧ dθ_{i+n} and the
//! flat metric, where harmonic 1-forms are the constant-coefficient forms.
//! Every symplectic path is handled through its Hodge data (U, H) — a
//! normalized Hamiltonian family plus a harmonic family — and the crate
//! provides:
//!
//! * spectral Hodge decomposition of closed 1-form fields ([`hodge`]),
//! * the generator group law, inverse, Δ̃ integral and the D² metric
//!   ([`generator`]),
//! * flow-map integration, inversion, composition and C⁰ path distances
//!   ([`flow`]),
//! * flux, Fathi mass flow by two independent routes, and the flux-zero
//!   classifier ([`flux`]),
//! * Hofer-like lengths, norm upper bounds and displacement-energy bounds
//!   ([`hofer`]),
//! * the flux-killing deformation and the two-parameter sequential
//!   deformation families ([`deform`]),
//! * builders for rotation/conjugation/strip scenarios ([`scenarios`]).
//!
//! Grid loops are data-parallel on the rayon pool when the `parallel`
//! feature (default) is enabled; disabling it yields a fully sequential
//! build with identical results.

// numeric kernels index several arrays in lockstep, and `!(x > 0)` guards
// are written that way to reject NaNs
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod deform;
pub mod error;
pub mod field;
pub mod flow;
pub mod flux;
pub mod generator;
pub mod grid;
pub mod hodge;
pub mod hofer;
pub mod interp;
pub mod io;
pub mod par;
pub mod sampling;
pub mod scenarios;
pub mod spectral;
pub mod symplectic;
pub mod verify;

pub use error::{Error, Result};
pub use field::{HarmonicForm, OneFormField, ScalarField, VectorFieldGrid};
pub use flow::{FlowParams, Isotopy, PathDistanceReport};
pub use generator::{Generator, Params};
pub use grid::{GridSpec, TimeGrid, TorusDim, TorusPoint};
pub use hodge::{HodgeParams, HodgeSplit};
pub use interp::InterpMethod;
