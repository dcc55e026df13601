//! Structured grids, fields, finite-difference operators and quadrature.
//!
//! Nodes are collocated; every operator is second order. Wall axes use
//! one-sided stencils at the end nodes, Periodic axes wrap around.

mod field;
mod grid;
mod ops;
mod quadrature;
pub mod snapshot;
mod stencil;

pub use field::{FieldQuartet, ScalarField, VectorField};
pub use grid::{Boundary, Face, Grid, Side};
pub use ops::{
    divergence, grad, gradient, gradient_adjoint, laplacian, second_derivative, time_derivative,
    time_derivative_adjoint,
};
pub use quadrature::{boundary_integral, integrate_space, integrate_space_slices, integrate_spacetime};
pub use stencil::Stencil1d;
