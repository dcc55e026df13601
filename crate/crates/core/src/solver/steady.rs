use std::sync::Arc;

use super::march::{cn_step, level_pressure};
use super::newton::{gauss_newton, gauge_patterns, inward, norm};
use super::spectral::Spectral2d;
use super::{IterRecord, SolveConfig, SolveStatus, Trajectory};
use crate::error::{domain, Result};
use crate::field::{FieldQuartet, Grid, ScalarField, VectorField};
use crate::lagrangian::el_residuals;
use crate::scalar::{count, lit, Scalar};

/// Velocity data of a steady problem on a steady grid: its values on Wall
/// nodes are the prescribed boundary velocity, all other values are the
/// starting guess.
#[derive(Clone, Debug)]
pub struct SteadyData<T> {
    pub velocity: VectorField<T>,
}

fn symmetric_quartet<T: Scalar>(grid: &Arc<Grid<T>>, v: &[Vec<T>], q: Vec<T>) -> Result<FieldQuartet<T>> {
    let u = VectorField::new(v.iter().map(|c| ScalarField::from_parts(grid.clone(), c.clone())).collect())?;
    FieldQuartet::symmetric(u, ScalarField::from_parts(grid.clone(), q))
}

/// Steady solution with `u = w`, `p = r`.
///
/// On 2D all-Periodic grids the reduced solver is marched in pseudo-time
/// (step `pseudo_dt`) from the projected starting guess until
/// `|v_new - v_old|_rms / pseudo_dt <= newton_tol`. On grids with walls the
/// steady Euler-Lagrange rows of the symmetric quartet are solved by damped
/// Gauss-Newton with a Levenberg-Marquardt shift `|R| / (|R_0| pseudo_dt)`,
/// each iteration counting as one pseudo step.
///
/// History has one record per pseudo step; a residual plateau over 100 steps
/// ends the run as stagnated.
pub fn steady_solve<T: Scalar>(data: &SteadyData<T>, config: &SolveConfig, grid: &Arc<Grid<T>>) -> Result<Trajectory<T>> {
    config.validate()?;
    if !grid.is_steady() {
        return Err(domain("the steady solver needs a single time level"));
    }
    if data.velocity.grid() != grid {
        return Err(domain("steady data must live on the solver grid"));
    }
    if grid.has_wall() {
        walled(data, config, grid)
    } else {
        periodic(data, config, grid)
    }
}

fn periodic<T: Scalar>(data: &SteadyData<T>, config: &SolveConfig, grid: &Arc<Grid<T>>) -> Result<Trajectory<T>> {
    if grid.dim() != 2 {
        return Err(domain("periodic steady solves are two-dimensional"));
    }
    let spec = Spectral2d::new(grid);
    let mut hat = [spec.forward(data.velocity.comp(0).values()), spec.forward(data.velocity.comp(1).values())];
    spec.project(&mut hat);
    let mut v = [spec.inverse(hat[0].clone()), spec.inverse(hat[1].clone())];
    let dt = lit::<T>(config.pseudo_dt);
    let nu: T = config.nu();
    let tol = lit::<T>(config.newton_tol);
    let mut history: Vec<IterRecord<T>> = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let n = count::<T>(2 * grid.len());
    for step in 1..=config.max_pseudo_steps {
        let old = v.clone();
        cn_step(&mut v, dt, nu, config, grid, &spec);
        let change = (0..2)
            .flat_map(|i| old[i].iter().zip(&v[i]).map(|(&a, &b)| (b - a) * (b - a)))
            .fold(T::zero(), |a, x| a + x);
        let rate = (change / n).sqrt() / dt;
        if !rate.is_finite() {
            return Err(crate::error::Error::Numerical(format!("pseudo-time march diverged at step {step}")));
        }
        history.push(IterRecord { iter: step, residual: rate, u_w_gap: T::zero(), j: None });
        if rate <= tol {
            status = SolveStatus::Converged;
            break;
        }
        if step > 100 && rate > lit::<T>(0.999) * history[step - 101].residual {
            status = SolveStatus::Stagnated;
            break;
        }
    }
    let q = level_pressure(&v, grid, &spec);
    Ok(Trajectory { quartet: symmetric_quartet(grid, &v, q)?, history, status })
}

fn walled<T: Scalar>(data: &SteadyData<T>, config: &SolveConfig, grid: &Arc<Grid<T>>) -> Result<Trajectory<T>> {
    let dim = grid.dim();
    let nv = dim + 1;
    let slen = grid.space_len();
    let nu: T = config.nu();
    let patterns = gauge_patterns(grid);
    let unpack = |x: &[T]| -> FieldQuartet<T> {
        let v: Vec<Vec<T>> = (0..dim).map(|i| (0..slen).map(|k| x[k * nv + i]).collect()).collect();
        let q = (0..slen).map(|k| x[k * nv + dim]).collect();
        symmetric_quartet(grid, &v, q).expect("shapes fixed by the grid")
    };
    let residual = |x: &[T]| -> Vec<T> {
        let state = unpack(x);
        let el = el_residuals(&state, nu).expect("validated viscosity");
        let mut out = Vec::with_capacity(slen * nv + patterns.len());
        for k in 0..slen {
            if grid.is_boundary_node(k) {
                for i in 0..dim {
                    out.push(x[k * nv + i] - data.velocity.comp(i).at(0, k));
                }
                let (k1, k2) = inward(grid, k);
                out.push(x[k * nv + dim] - lit::<T>(2.0) * x[k1 * nv + dim] + x[k2 * nv + dim]);
            } else {
                for i in 0..dim {
                    out.push(el.res_u.comp(i).at(0, k));
                }
                out.push(el.res_div_u.at(0, k));
            }
        }
        for pat in &patterns {
            out.push((0..slen).fold(T::zero(), |a, k| a + pat[k] * x[k * nv + dim]));
        }
        out
    };
    let mut x = vec![T::zero(); slen * nv];
    for k in 0..slen {
        for i in 0..dim {
            x[k * nv + i] = data.velocity.comp(i).at(0, k);
        }
    }
    let r0 = norm(&residual(&x));
    let inv_dt = T::one() / lit::<T>(config.pseudo_dt);
    let shift = |rn: T, _: T| if r0 > T::zero() { inv_dt * rn / r0 } else { T::zero() };
    let mut history = Vec::new();
    let mut observe = |_: &[T], rn: T| -> Result<()> {
        history.push(IterRecord { iter: history.len() + 1, residual: rn, u_w_gap: T::zero(), j: None });
        Ok(())
    };
    let status = gauss_newton(
        &residual,
        &mut x,
        lit(config.newton_tol),
        config.max_pseudo_steps,
        &shift,
        &mut observe,
    )?;
    Ok(Trajectory { quartet: unpack(&x), history, status })
}
