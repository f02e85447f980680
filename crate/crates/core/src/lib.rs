//! Bound states of the one-dimensional Coulomb problem `P²/2m - α/X` in
//! deformed Heisenberg algebras `[X, P] = iħ f(P)` that carry a minimal length.
//!
//! * [`algebra`]: deformation families, the pseudo-momentum map `g`, the bound
//!   `b` and the minimal length.
//! * [`numerics`]: double-exponential quadrature, bracketing root finder, fits.
//! * [`spectrum`]: the quantization condition, closed-form spectra and the
//!   leading deformation corrections.
//! * [`eigenfunctions`]: normalized momentum-space bound states and the
//!   integral Schrödinger equation they satisfy.
//! * [`extensions`]: self-adjoint extensions of the position operator and its
//!   two-sided inverse.

// `!(x > 0.0)` rejects NaN along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Exact float parameters read better as guards than as literal patterns.
#![allow(clippy::redundant_guards)]

pub mod algebra;
pub mod eigenfunctions;
pub mod error;
pub mod extensions;
pub mod numerics;
pub mod spectrum;

pub use algebra::{AlgebraContext, CustomDeformation, DeformationFamily, PhysicalParams};
pub use error::{Error, Result};
pub use numerics::{QuadratureSpec, RootSpec};
pub use spectrum::{EnergyLevel, ExtensionParam};
