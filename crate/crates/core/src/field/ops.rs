//! Finite-difference operators on fields, and their adjoints with respect
//! to the quadrature inner product.

use crate::error::{domain, Result};
use crate::field::stencil::{scale_along, Stencil1d};
use crate::field::{ScalarField, VectorField};
use crate::scalar::Scalar;

fn check_axis<T: Scalar>(f: &ScalarField<T>, axis: usize) -> Result<()> {
    let dim = f.grid().dim();
    if axis >= dim {
        return Err(domain(format!("axis {axis} out of range for a {dim}-dimensional grid")));
    }
    Ok(())
}

fn check_time<T: Scalar>(f: &ScalarField<T>) -> Result<()> {
    let nt = f.grid().time_nodes();
    if nt < 3 {
        return Err(domain(format!("time derivative needs at least 3 time nodes, grid has {nt}")));
    }
    Ok(())
}

fn first_stencil<T: Scalar>(f: &ScalarField<T>, axis: usize) -> Stencil1d<T> {
    let g = f.grid();
    Stencil1d::first_derivative(g.nodes(axis), g.spacing(axis), g.boundary(axis))
}

fn time_stencil<T: Scalar>(f: &ScalarField<T>) -> Stencil1d<T> {
    let g = f.grid();
    Stencil1d::first_derivative(g.time_nodes(), g.dt(), crate::field::Boundary::Wall)
}

/// Partial derivative along a spatial axis.
pub fn gradient<T: Scalar>(f: &ScalarField<T>, axis: usize) -> Result<ScalarField<T>> {
    check_axis(f, axis)?;
    let shape = f.grid().shape();
    let out = first_stencil(f, axis).apply_along(f.values(), shape, axis + 1, false);
    Ok(ScalarField::from_parts(f.grid().clone(), out))
}

/// All spatial partial derivatives of `f`, one per axis.
pub fn grad<T: Scalar>(f: &ScalarField<T>) -> Vec<ScalarField<T>> {
    (0..f.grid().dim())
        .map(|a| gradient(f, a).expect("axis in range"))
        .collect()
}

/// Sum of `d v_i / d x_i`.
pub fn divergence<T: Scalar>(v: &VectorField<T>) -> ScalarField<T> {
    let mut acc = ScalarField::zeros(v.grid());
    for (i, c) in v.comps().iter().enumerate() {
        acc.axpy(T::one(), &gradient(c, i).expect("axis in range"));
    }
    acc
}

/// Second derivative along one axis.
pub fn second_derivative<T: Scalar>(f: &ScalarField<T>, axis: usize) -> Result<ScalarField<T>> {
    check_axis(f, axis)?;
    let g = f.grid();
    let s = Stencil1d::second_derivative(g.nodes(axis), g.spacing(axis), g.boundary(axis));
    Ok(ScalarField::from_parts(g.clone(), s.apply_along(f.values(), g.shape(), axis + 1, false)))
}

/// Compact (3/5/7-point) Laplacian.
pub fn laplacian<T: Scalar>(f: &ScalarField<T>) -> ScalarField<T> {
    let mut acc = ScalarField::zeros(f.grid());
    for a in 0..f.grid().dim() {
        acc.axpy(T::one(), &second_derivative(f, a).expect("axis in range"));
    }
    acc
}

/// Time derivative: central in interior levels, one-sided at `t = 0, tau`.
pub fn time_derivative<T: Scalar>(f: &ScalarField<T>) -> Result<ScalarField<T>> {
    check_time(f)?;
    let shape = f.grid().shape();
    let out = time_stencil(f).apply_along(f.values(), shape, 0, false);
    Ok(ScalarField::from_parts(f.grid().clone(), out))
}

/// Adjoint of [`gradient`] in the quadrature inner product:
/// `Q(f * D g) = Q((D* f) * g)` exactly, boundary contributions included.
pub fn gradient_adjoint<T: Scalar>(f: &ScalarField<T>, axis: usize) -> Result<ScalarField<T>> {
    check_axis(f, axis)?;
    let g = f.grid();
    let shape = g.shape();
    let w = g.axis_weights(axis);
    let mut v = f.values().to_vec();
    scale_along(&mut v, shape, axis + 1, &w, false);
    let mut out = first_stencil(f, axis).apply_along(&v, shape, axis + 1, true);
    scale_along(&mut out, shape, axis + 1, &w, true);
    Ok(ScalarField::from_parts(g.clone(), out))
}

/// Adjoint of [`time_derivative`] in the space-time quadrature inner product.
pub fn time_derivative_adjoint<T: Scalar>(f: &ScalarField<T>) -> Result<ScalarField<T>> {
    check_time(f)?;
    let g = f.grid();
    let shape = g.shape();
    let w = g.time_weights();
    let mut v = f.values().to_vec();
    scale_along(&mut v, shape, 0, &w, false);
    let mut out = time_stencil(f).apply_along(&v, shape, 0, true);
    scale_along(&mut out, shape, 0, &w, true);
    Ok(ScalarField::from_parts(g.clone(), out))
}
