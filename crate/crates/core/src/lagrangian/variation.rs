use super::jacobian;
use crate::error::{domain, precondition, Result};
use crate::field::{
    gradient, gradient_adjoint, integrate_spacetime, time_derivative, time_derivative_adjoint, FieldQuartet,
    ScalarField, VectorField,
};
use crate::scalar::{lit, Scalar};

/// Gradient of `J` with respect to the nodal values, in the quadrature
/// inner product: `delta J = Q(G_u . du + G_p dp + G_w . dw + G_r dr)`.
///
/// Derivatives landing on the variation are moved onto the coefficients by
/// the discrete adjoints of the difference operators, so the result is the
/// exact derivative of the discrete `J`.
pub fn variation_gradient<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<FieldQuartet<T>> {
    state.check_grids()?;
    if nu < T::zero() {
        return Err(domain(format!("viscosity must be non-negative, got {nu}")));
    }
    let (gu_a, gw_a, gp) = half_gradient(&state.u, &state.w, &state.p, nu);
    let (gw_b, gu_b, gr) = half_gradient(&state.w, &state.u, &state.r, nu);
    Ok(FieldQuartet {
        u: &gu_a - &gu_b,
        p: gp,
        w: &gw_a - &gw_b,
        r: -&gr,
    })
}

/// Gradient of the four `u`-primary terms with respect to `u`, `w` and `p`.
fn half_gradient<T: Scalar>(
    u: &VectorField<T>,
    w: &VectorField<T>,
    p: &ScalarField<T>,
    nu: T,
) -> (VectorField<T>, VectorField<T>, ScalarField<T>) {
    let g = u.grid();
    let dim = g.dim();
    let len = g.len();
    let half = lit::<T>(0.5);
    let du = jacobian(u);
    let dw = jacobian(w);
    let s: Vec<Vec<T>> = (0..dim)
        .map(|i| u.comp(i).values().iter().zip(w.comp(i).values()).map(|(&a, &b)| b + a).collect())
        .collect();
    let mut gu = Vec::with_capacity(dim);
    let mut gw = Vec::with_capacity(dim);
    let mut gp = ScalarField::zeros(g);
    for k in 0..dim {
        let mut a = ScalarField::zeros(g);
        let mut b = ScalarField::zeros(g);
        // viscous
        for j in 0..dim {
            a.axpy(nu, &gradient_adjoint(&du[k][j], j).expect("axis in range"));
        }
        // advective: 1/2 (w_i + u_i) u_j dw_i/dx_j
        {
            let av = a.values_mut();
            for j in 0..dim {
                let uj = u.comp(j).values();
                let dwkj = dw[k][j].values();
                for n in 0..len {
                    av[n] = av[n] + half * uj[n] * dwkj[n];
                }
            }
            for i in 0..dim {
                let dwik = dw[i][k].values();
                for n in 0..len {
                    av[n] = av[n] + half * s[i][n] * dwik[n];
                }
            }
        }
        {
            let bv = b.values_mut();
            for j in 0..dim {
                let uj = u.comp(j).values();
                let dwkj = dw[k][j].values();
                for n in 0..len {
                    bv[n] = bv[n] + half * uj[n] * dwkj[n];
                }
            }
        }
        for j in 0..dim {
            let flux: Vec<T> = (0..len).map(|n| half * s[k][n] * u.comp(j).values()[n]).collect();
            let flux = ScalarField::from_parts(g.clone(), flux);
            b.axpy(T::one(), &gradient_adjoint(&flux, j).expect("axis in range"));
        }
        // pressure
        a.axpy(T::one(), &gradient(p, k).expect("axis in range"));
        gp.axpy(T::one(), &gradient_adjoint(u.comp(k), k).expect("axis in range"));
        // temporal: u_i/2 dw_i/dt
        if !g.is_steady() {
            a.axpy(half, &time_derivative(w.comp(k)).expect("time levels checked by grid"));
            b.axpy(half, &time_derivative_adjoint(u.comp(k)).expect("time levels checked by grid"));
        }
        gu.push(a);
        gw.push(b);
    }
    (
        VectorField::new(gu).expect("components share the grid"),
        VectorField::new(gw).expect("components share the grid"),
        gp,
    )
}

fn check_admissible<T: Scalar>(direction: &FieldQuartet<T>) -> Result<()> {
    let g = direction.grid();
    let tol = lit::<T>(1e-12) * direction.max_abs().max(T::one());
    let nt = g.time_nodes();
    for n in 0..nt {
        for k in 0..g.space_len() {
            let wall = g.is_boundary_node(k);
            let end = !g.is_steady() && (n == 0 || n == nt - 1);
            for i in 0..g.dim() {
                let du = direction.u.comp(i).at(n, k);
                let dw = direction.w.comp(i).at(n, k);
                if wall && (du.abs() > tol || dw.abs() > tol) {
                    return Err(precondition(format!(
                        "velocity variations must vanish on the boundary; node {:?} at time level {n} has ({du}, {dw})",
                        g.space_multi(k)
                    )));
                }
                if end && (du - dw).abs() > tol {
                    return Err(precondition(format!(
                        "velocity variations must agree at t = {}; node {:?} differs by {}",
                        g.time(n),
                        g.space_multi(k),
                        (du - dw).abs()
                    )));
                }
            }
            let (dp, dr) = (direction.p.at(n, k), direction.r.at(n, k));
            if wall && (dp - dr).abs() > tol {
                return Err(precondition(format!(
                    "pressure variations must agree on the boundary; node {:?} differs by {}",
                    g.space_multi(k),
                    (dp - dr).abs()
                )));
            }
        }
    }
    Ok(())
}

/// First variation of `J` at `state` in an admissible `direction`: variations
/// of `u`, `w` vanish on walls and agree at `t = 0` and `t = tau`; pressure
/// variations agree on walls.
pub fn first_variation<T: Scalar>(state: &FieldQuartet<T>, direction: &FieldQuartet<T>, nu: T) -> Result<T> {
    direction.check_grids()?;
    if !std::sync::Arc::ptr_eq(state.grid(), direction.grid()) && state.grid() != direction.grid() {
        return Err(domain("state and direction live on different grids"));
    }
    check_admissible(direction)?;
    let grad = variation_gradient(state, nu)?;
    let mut acc = grad.p.hadamard(&direction.p);
    acc.axpy(T::one(), &grad.r.hadamard(&direction.r));
    for i in 0..grad.u.dim() {
        acc.axpy(T::one(), &grad.u.comp(i).hadamard(direction.u.comp(i)));
        acc.axpy(T::one(), &grad.w.comp(i).hadamard(direction.w.comp(i)));
    }
    Ok(integrate_spacetime(&acc))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::error::Error;
    use crate::field::{Boundary, Grid};
    use crate::lagrangian::evaluate_lagrangian;

    fn grid() -> Arc<Grid<f64>> {
        Arc::new(Grid::new(vec![1.0, 1.5], vec![7, 6], vec![Boundary::Wall, Boundary::Periodic], 4, 0.1).unwrap())
    }

    fn state(g: &Arc<Grid<f64>>) -> FieldQuartet<f64> {
        let u = VectorField::from_fn(g, |x, t, i| (2.0 * x[0] + i as f64).sin() * (1.0 + t) + x[1].cos());
        let w = VectorField::from_fn(g, |x, t, i| (x[1] * (i as f64 + 1.0)).cos() * x[0] - t);
        let p = ScalarField::from_fn(g, |x, _| (x[0] + x[1]).sin());
        let r = ScalarField::from_fn(g, |x, t| x[0].cos() * t);
        FieldQuartet::new(u, p, w, r).unwrap()
    }

    fn direction(g: &Arc<Grid<f64>>) -> FieldQuartet<f64> {
        let bump = |x: &[f64]| x[0] * (1.0 - x[0]);
        let du = VectorField::from_fn(g, |x, t, i| bump(x) * (x[1] + t + i as f64).sin());
        let dw = VectorField::from_fn(g, |x, t, i| {
            let end = t < 1e-12 || (t - 0.3).abs() < 1e-12;
            bump(x) * if end { (x[1] + t + i as f64).sin() } else { (3.0 * x[1]).cos() }
        });
        let dp = ScalarField::from_fn(g, |x, _| x[1].cos());
        let dr = ScalarField::from_fn(g, |x, _| x[1].cos() + bump(x));
        FieldQuartet::new(du, dp, dw, dr).unwrap()
    }

    #[test]
    fn matches_central_difference() {
        let g = grid();
        let (s, d) = (state(&g), direction(&g));
        let nu = 0.3;
        let eps = 1e-5;
        let jp = evaluate_lagrangian(&s.add_scaled(eps, &d), nu).unwrap().j;
        let jm = evaluate_lagrangian(&s.add_scaled(-eps, &d), nu).unwrap().j;
        let fd = (jp - jm) / (2.0 * eps);
        let dj = first_variation(&s, &d, nu).unwrap();
        assert!((dj - fd).abs() <= 1e-7 * dj.abs(), "{dj} vs {fd}");
    }

    #[test]
    fn zero_direction_gives_zero() {
        let g = grid();
        assert_eq!(first_variation(&state(&g), &FieldQuartet::zeros(&g), 0.3).unwrap(), 0.0);
    }

    #[test]
    fn inadmissible_direction_rejected() {
        let g = grid();
        let mut d = FieldQuartet::zeros(&g);
        d.u.comp_mut(0).set(1, 0, 1.0);
        assert!(matches!(first_variation(&state(&g), &d, 0.3), Err(Error::Precondition(_))));
    }
}
