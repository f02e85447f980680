//! Quadrature, root finding and fitting kernels shared by every physics module.

pub mod fit;
mod quadrature;
mod roots;

pub use quadrature::{
    integrate, integrate_complex, integrate_with_edges, Estimate, Integrand, QuadratureSpec,
};
pub use roots::{solve_root, Domain, RootSpec};
