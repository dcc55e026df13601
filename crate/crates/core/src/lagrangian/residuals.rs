use super::jacobian;
use crate::error::{domain, Result};
use crate::field::{divergence, gradient, laplacian, time_derivative, FieldQuartet, ScalarField, VectorField};
use crate::scalar::{lit, Scalar};

/// Euler-Lagrange residuals of the dual functional.
#[derive(Clone, Debug)]
pub struct ElResiduals<T> {
    pub res_div_u: ScalarField<T>,
    pub res_div_w: ScalarField<T>,
    pub res_u: VectorField<T>,
    pub res_w: VectorField<T>,
}

impl<T: Scalar> ElResiduals<T> {
    /// Largest absolute residual over all four equations.
    pub fn max_abs(&self) -> T {
        self.res_div_u
            .max_abs()
            .max(self.res_div_w.max_abs())
            .max(self.res_u.max_abs())
            .max(self.res_w.max_abs())
    }

    /// Root-mean-square over all nodes of all four equations.
    pub fn rms(&self) -> T {
        let fields = [&self.res_div_u, &self.res_div_w]
            .into_iter()
            .chain(self.res_u.comps())
            .chain(self.res_w.comps());
        let (sum, n) = fields.fold((T::zero(), 0usize), |(s, n), f| {
            let r = f.rms();
            (s + r * r, n + 1)
        });
        (sum / crate::scalar::count(n)).sqrt()
    }
}

/// `nu lap u - grad p - dw/dt - 1/2 (u_j + w_j)(dw_i/dx_j + dw_j/dx_i)`.
fn momentum<T: Scalar>(u: &VectorField<T>, w: &VectorField<T>, p: &ScalarField<T>, nu: T) -> VectorField<T> {
    let g = u.grid();
    let dim = g.dim();
    let half = lit::<T>(0.5);
    let dw = jacobian(w);
    let comps = (0..dim)
        .map(|i| {
            let mut res = laplacian(u.comp(i)).map(|v| v * nu);
            res.axpy(-T::one(), &gradient(p, i).expect("axis in range"));
            if !g.is_steady() {
                res.axpy(-T::one(), &time_derivative(w.comp(i)).expect("time levels checked by grid"));
            }
            let out = res.values_mut();
            for j in 0..dim {
                let (uj, wj) = (u.comp(j).values(), w.comp(j).values());
                let (a, b) = (dw[i][j].values(), dw[j][i].values());
                for k in 0..out.len() {
                    out[k] = out[k] - half * (uj[k] + wj[k]) * (a[k] + b[k]);
                }
            }
            res
        })
        .collect();
    VectorField::new(comps).expect("components share the grid")
}

/// Residuals of the four Euler-Lagrange rows. The `w` row is the `u` row
/// with `u` and `w` exchanged and `p` replaced by `r`.
pub fn el_residuals<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<ElResiduals<T>> {
    if nu < T::zero() {
        return Err(domain(format!("viscosity must be non-negative, got {nu}")));
    }
    state.check_grids()?;
    Ok(ElResiduals {
        res_div_u: divergence(&state.u),
        res_div_w: divergence(&state.w),
        res_u: momentum(&state.u, &state.w, &state.p, nu),
        res_w: momentum(&state.w, &state.u, &state.r, nu),
    })
}
