use crate::error::{domain, Result};
use crate::field::{ScalarField, VectorField};
use crate::scalar::Scalar;

/// Spatial integral of time level `n`: trapezoid on Wall axes, rectangle
/// rule on Periodic axes.
pub fn integrate_space<T: Scalar>(f: &ScalarField<T>, n: usize) -> Result<T> {
    let g = f.grid();
    if n >= g.time_nodes() {
        return Err(domain(format!("time index {n} out of range ({} levels)", g.time_nodes())));
    }
    let w = g.space_weights();
    Ok(weighted_sum(f.slice(n), &w))
}

/// Spatial integral of every time level.
pub fn integrate_space_slices<T: Scalar>(f: &ScalarField<T>) -> Vec<T> {
    let w = f.grid().space_weights();
    (0..f.grid().time_nodes()).map(|n| weighted_sum(f.slice(n), &w)).collect()
}

/// Time trapezoid of the spatial integrals. On a steady grid this is the
/// spatial integral.
pub fn integrate_spacetime<T: Scalar>(f: &ScalarField<T>) -> T {
    let slices = integrate_space_slices(f);
    weighted_sum(&slices, &f.grid().time_weights())
}

/// Outward flux `sum over Wall faces of flux . n dS` at time level `n`.
/// Zero on all-Periodic grids.
pub fn boundary_integral<T: Scalar>(flux: &VectorField<T>, n: usize) -> Result<T> {
    let g = flux.grid();
    if n >= g.time_nodes() {
        return Err(domain(format!("time index {n} out of range ({} levels)", g.time_nodes())));
    }
    let mut total = T::zero();
    for face in g.boundary_faces() {
        let comp = flux.comp(face.axis).slice(n);
        let s = weighted_sum_indexed(comp, &face.nodes, &face.weights);
        total = total + face.side.normal_sign::<T>() * s;
    }
    Ok(total)
}

pub(crate) fn weighted_sum<T: Scalar>(values: &[T], weights: &[T]) -> T {
    values.iter().zip(weights).fold(T::zero(), |acc, (&v, &w)| acc + v * w)
}

pub(crate) fn weighted_sum_indexed<T: Scalar>(values: &[T], idx: &[usize], weights: &[T]) -> T {
    idx.iter().zip(weights).fold(T::zero(), |acc, (&k, &w)| acc + values[k] * w)
}
