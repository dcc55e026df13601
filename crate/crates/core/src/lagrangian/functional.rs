use serde::Serialize;

use super::jacobian;
use crate::error::Result;
use crate::field::{gradient, integrate_space_slices, time_derivative, FieldQuartet, ScalarField, VectorField};
use crate::scalar::{lit, Scalar};

/// Space-time integrals of the four pairs of Lagrangian terms. Each entry
/// is the `u`-side term minus its swapped counterpart.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct TermBreakdown<T> {
    pub viscous: T,
    pub advective: T,
    pub pressure: T,
    pub temporal: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct LagrangianReport<T> {
    #[serde(rename = "J")]
    pub j: T,
    /// Spatial integral of the Lagrangian at each time level.
    pub slices: Vec<T>,
    pub breakdown: TermBreakdown<T>,
    /// Integral of the sum of absolute values of all eight terms; the
    /// reference size for relative tolerances on `J`.
    pub magnitude: T,
}

/// Node-wise Lagrangian together with the four term pairs and the
/// absolute-value density. Time-derivative terms are dropped on steady grids.
pub(crate) struct Density<T> {
    pub total: ScalarField<T>,
    pub pairs: [ScalarField<T>; 4],
    pub absolute: ScalarField<T>,
}

struct HalfTerms<T> {
    viscous: Vec<T>,
    advective: Vec<T>,
    pressure: Vec<T>,
    temporal: Vec<T>,
}

/// The four terms carrying `u` as the primary field:
/// `nu/2 (du_i/dx_j)^2`, `1/2 (w_i + u_i) u_j dw_i/dx_j`, `u_i dp/dx_i`,
/// `u_i/2 dw_i/dt`. The other four are this with `(u, p)` and `(w, r)` swapped.
fn half_terms<T: Scalar>(u: &VectorField<T>, w: &VectorField<T>, p: &ScalarField<T>, nu: T) -> HalfTerms<T> {
    let g = u.grid();
    let len = g.len();
    let dim = g.dim();
    let half = lit::<T>(0.5);
    let du = jacobian(u);
    let dw = jacobian(w);
    let mut viscous = vec![T::zero(); len];
    let mut advective = vec![T::zero(); len];
    let mut pressure = vec![T::zero(); len];
    let mut temporal = vec![T::zero(); len];
    for i in 0..dim {
        let ui = u.comp(i).values();
        let wi = w.comp(i).values();
        let dp = gradient(p, i).expect("axis in range");
        for k in 0..len {
            pressure[k] = pressure[k] + ui[k] * dp.values()[k];
        }
        for j in 0..dim {
            let duij = du[i][j].values();
            let dwij = dw[i][j].values();
            let uj = u.comp(j).values();
            for k in 0..len {
                viscous[k] = viscous[k] + duij[k] * duij[k];
                advective[k] = advective[k] + (wi[k] + ui[k]) * uj[k] * dwij[k];
            }
        }
        if !g.is_steady() {
            let dtw = time_derivative(w.comp(i)).expect("time levels checked by grid");
            for k in 0..len {
                temporal[k] = temporal[k] + ui[k] * dtw.values()[k];
            }
        }
    }
    for k in 0..len {
        viscous[k] = viscous[k] * nu * half;
        advective[k] = advective[k] * half;
        temporal[k] = temporal[k] * half;
    }
    HalfTerms { viscous, advective, pressure, temporal }
}

pub(crate) fn density<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<Density<T>> {
    state.check_grids()?;
    let grid = state.grid().clone();
    let a = half_terms(&state.u, &state.w, &state.p, nu);
    let b = half_terms(&state.w, &state.u, &state.r, nu);
    let len = grid.len();
    let pair = |x: &[T], y: &[T]| -> Vec<T> { x.iter().zip(y).map(|(&x, &y)| x - y).collect() };
    let viscous = pair(&a.viscous, &b.viscous);
    let advective = pair(&a.advective, &b.advective);
    let pressure = pair(&a.pressure, &b.pressure);
    let temporal = pair(&a.temporal, &b.temporal);
    let mut total = vec![T::zero(); len];
    let mut absolute = vec![T::zero(); len];
    for k in 0..len {
        total[k] = viscous[k] + advective[k] + pressure[k] + temporal[k];
        absolute[k] = [&a, &b]
            .iter()
            .map(|h| h.viscous[k].abs() + h.advective[k].abs() + h.pressure[k].abs() + h.temporal[k].abs())
            .fold(T::zero(), |s, v| s + v);
    }
    let field = |v: Vec<T>| ScalarField::from_parts(grid.clone(), v);
    Ok(Density {
        total: field(total),
        pairs: [field(viscous), field(advective), field(pressure), field(temporal)],
        absolute: field(absolute),
    })
}

/// Node-wise Lagrangian of the quartet.
pub fn lagrangian_density<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<ScalarField<T>> {
    Ok(density(state, nu)?.total)
}

fn spacetime<T: Scalar>(slices: &[T], weights: &[T]) -> T {
    slices.iter().zip(weights).fold(T::zero(), |acc, (&s, &w)| acc + s * w)
}

/// `J`: space-time quadrature of the Lagrangian. On a steady grid the
/// time-derivative terms are absent and `J` is the spatial integral.
pub fn evaluate_lagrangian<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<LagrangianReport<T>> {
    if nu < T::zero() {
        return Err(crate::error::domain(format!("viscosity must be non-negative, got {nu}")));
    }
    let d = density(state, nu)?;
    let tw = state.grid().time_weights();
    let slices = integrate_space_slices(&d.total);
    let j = spacetime(&slices, &tw);
    let integral = |f: &ScalarField<T>| spacetime(&integrate_space_slices(f), &tw);
    let [viscous, advective, pressure, temporal] = &d.pairs;
    Ok(LagrangianReport {
        j,
        slices,
        breakdown: TermBreakdown {
            viscous: integral(viscous),
            advective: integral(advective),
            pressure: integral(pressure),
            temporal: integral(temporal),
        },
        magnitude: integral(&d.absolute),
    })
}

/// `J(w, r, u, p)`.
pub fn swap_functional<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<T> {
    Ok(evaluate_lagrangian(&state.swapped(), nu)?.j)
}
