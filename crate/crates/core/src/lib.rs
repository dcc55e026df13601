//! Numerical laboratory for the dual-field variational principle of the
//! incompressible Navier-Stokes equations.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common precisions.

pub mod boundary;
pub mod error;
pub mod field;
pub mod lagrangian;
pub mod linalg;
pub mod oscillator;
pub mod scalar;
pub mod scenario;
pub mod solver;
pub mod steady;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Grid64 = field::Grid<f64>;
pub type ScalarField64 = field::ScalarField<f64>;
pub type VectorField64 = field::VectorField<f64>;
pub type FieldQuartet64 = field::FieldQuartet<f64>;
pub type Trajectory64 = solver::Trajectory<f64>;
pub type OscillatorProblem64 = oscillator::OscillatorProblem<f64>;

pub type Grid32 = field::Grid<f32>;
pub type ScalarField32 = field::ScalarField<f32>;
pub type VectorField32 = field::VectorField<f32>;
pub type FieldQuartet32 = field::FieldQuartet<f32>;
pub type Trajectory32 = solver::Trajectory<f32>;
pub type OscillatorProblem32 = oscillator::OscillatorProblem<f32>;
