use std::sync::Arc;

use rustfft::num_complex::Complex;

use super::spectral::Spectral2d;
use super::{SolveConfig, SolveStatus, Trajectory, IterRecord};
use crate::error::{domain, Result};
use crate::field::{divergence, gradient, FieldQuartet, Grid, ScalarField, VectorField};
use crate::scalar::{lit, Scalar};

/// `(v . D) v` on a steady 2D grid.
fn advection<T: Scalar>(v: &[Vec<T>; 2], grid: &Arc<Grid<T>>) -> [Vec<T>; 2] {
    let comps: Vec<ScalarField<T>> = v.iter().map(|c| ScalarField::from_parts(grid.clone(), c.clone())).collect();
    let mut out = [vec![T::zero(); grid.len()], vec![T::zero(); grid.len()]];
    for i in 0..2 {
        for j in 0..2 {
            let d = gradient(&comps[i], j).expect("axis in range");
            for k in 0..grid.len() {
                out[i][k] = out[i][k] + v[j][k] * d.values()[k];
            }
        }
    }
    out
}

fn rms<T: Scalar>(v: &[Vec<T>; 2]) -> T {
    let n = v[0].len() * 2;
    let s = v.iter().flatten().fold(T::zero(), |a, &x| a + x * x);
    (s / crate::scalar::count(n)).sqrt()
}

/// Pressure `q = P - |v|^2 / 2` of a discretely solenoidal level `v`, where
/// `P` is the mean-free solution of `D . D P = -D . ((v . D) v)`.
pub(crate) fn level_pressure<T: Scalar>(v: &[Vec<T>; 2], grid: &Arc<Grid<T>>, spec: &Spectral2d<T>) -> Vec<T> {
    let adv = advection(v, grid);
    let f = [spec.forward(&adv[0]), spec.forward(&adv[1])];
    let pressure = spec.pressure(&f);
    (0..grid.len()).map(|k| pressure[k] - lit::<T>(0.5) * (v[0][k] * v[0][k] + v[1][k] * v[1][k])).collect()
}

/// One Crank-Nicolson step with Picard iteration on the advection term and
/// spectral projection; `v` is replaced by the new level. Returns whether
/// the Picard sweeps met `linear_tol`.
pub(crate) fn cn_step<T: Scalar>(
    v: &mut [Vec<T>; 2],
    dt: T,
    nu: T,
    config: &SolveConfig,
    grid: &Arc<Grid<T>>,
    spec: &Spectral2d<T>,
) -> bool {
    let half = lit::<T>(0.5);
    let old_hat = [spec.forward(&v[0]), spec.forward(&v[1])];
    let explicit: Vec<(T, T)> = (0..spec.len())
        .map(|k| {
            let l = spec.laplacian_symbol(k) * nu * dt * half;
            (T::one() - l, T::one() / (T::one() + l))
        })
        .collect();
    let old = v.clone();
    let mut guess = v.clone();
    let tol = lit::<T>(config.linear_tol);
    for _ in 0..config.picard_max {
        let mid = [0, 1].map(|i| (0..old[i].len()).map(|k| (old[i][k] + guess[i][k]) * half).collect::<Vec<T>>());
        let adv = advection(&mid, grid);
        let mut hat: [Vec<Complex<T>>; 2] = [0, 1].map(|i| {
            let a = spec.forward(&adv[i]);
            (0..spec.len())
                .map(|k| {
                    let (expl, inv) = explicit[k];
                    (old_hat[i][k] * expl - a[k] * dt) * inv
                })
                .collect()
        });
        spec.project(&mut hat);
        let next = [spec.inverse(hat[0].clone()), spec.inverse(std::mem::take(&mut hat[1]))];
        let change = rms(&[0, 1].map(|i| (0..next[i].len()).map(|k| next[i][k] - guess[i][k]).collect()));
        let size = rms(&next).max(T::one());
        guess = next;
        if change <= tol * size {
            *v = guess;
            return true;
        }
    }
    *v = guess;
    false
}

/// Marches the reduced system `dv/dt + (v . D) v = -D P + nu lap v`,
/// `D . v = 0` from a discretely solenoidal initial field on a 2D periodic
/// grid. The result is the symmetric quartet `u = w = v`, `p = r = P - |v|^2/2`.
///
/// History records one entry per time step: the Picard increment of the
/// last sweep and the discrete divergence of the new level.
pub fn march_reduced<T: Scalar>(
    initial: &VectorField<T>,
    config: &SolveConfig,
    grid: &Arc<Grid<T>>,
) -> Result<Trajectory<T>> {
    config.validate()?;
    if grid.dim() != 2 || !grid.all_periodic() {
        return Err(domain("the reduced solver needs a 2D all-Periodic grid"));
    }
    let space = Arc::new(grid.spatial());
    if **initial.grid() != *space {
        return Err(domain("initial field must live on the spatial grid of the march"));
    }
    let div0 = divergence(initial).max_abs();
    if div0 > lit::<T>(1e-8) {
        return Err(domain(format!("initial field is not discretely solenoidal: max |div| = {div0}")));
    }
    let nu: T = config.nu();
    let spec = Spectral2d::new(&space);
    let nt = grid.time_nodes();
    let mut u = VectorField::zeros(grid);
    let mut q = ScalarField::zeros(grid);
    let mut v = [initial.comp(0).values().to_vec(), initial.comp(1).values().to_vec()];
    let store = |u: &mut VectorField<T>, q: &mut ScalarField<T>, n: usize, v: &[Vec<T>; 2]| {
        for i in 0..2 {
            u.comp_mut(i).slice_mut(n).copy_from_slice(&v[i]);
        }
        q.slice_mut(n).copy_from_slice(&level_pressure(v, &space, &spec));
    };
    store(&mut u, &mut q, 0, &v);
    let mut history = Vec::with_capacity(nt.saturating_sub(1));
    let mut status = SolveStatus::Converged;
    for n in 1..nt {
        if !cn_step(&mut v, grid.dt(), nu, config, &space, &spec) {
            status = SolveStatus::MaxIterations;
        }
        if v.iter().flatten().any(|x| !x.is_finite()) {
            return Err(crate::error::Error::Numerical(format!("march diverged at time level {n}")));
        }
        store(&mut u, &mut q, n, &v);
        let level = VectorField::new(
            (0..2).map(|i| ScalarField::from_parts(space.clone(), v[i].clone())).collect(),
        )?;
        history.push(IterRecord {
            iter: n,
            residual: divergence(&level).max_abs(),
            u_w_gap: T::zero(),
            j: None,
        });
    }
    Ok(Trajectory { quartet: FieldQuartet::symmetric(u, q)?, history, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::taylor_green;

    fn tg_error(n: usize, steps: usize, dt: f64) -> f64 {
        let nu = 0.1;
        let grid = Arc::new(Grid::periodic_square(n, steps + 1, dt).unwrap());
        let exact = taylor_green(nu, &grid).unwrap();
        let space = Arc::new(grid.spatial());
        let init = VectorField::new(
            (0..2).map(|i| ScalarField::from_parts(space.clone(), exact.u.comp(i).slice(0).to_vec())).collect(),
        )
        .unwrap();
        let config = SolveConfig { nu, ..SolveConfig::default() };
        let t = march_reduced(&init, &config, &grid).unwrap();
        assert!(t.converged());
        let diff = &t.quartet.u - &exact.u;
        let last = steps;
        let num: f64 = (0..2).map(|i| diff.comp(i).slice(last).iter().map(|x| x * x).sum::<f64>()).sum();
        let den: f64 = (0..2).map(|i| exact.u.comp(i).slice(last).iter().map(|x| x * x).sum::<f64>()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn zero_initial_stays_zero() {
        let grid = Arc::new(Grid::<f64>::periodic_square(8, 4, 0.1).unwrap());
        let init = VectorField::zeros(&Arc::new(grid.spatial()));
        let t = march_reduced(&init, &SolveConfig::default(), &grid).unwrap();
        assert_eq!(t.quartet.max_abs(), 0.0);
    }

    #[test]
    fn taylor_green_error_is_second_order() {
        let coarse = tg_error(16, 10, 0.04);
        let fine = tg_error(32, 20, 0.02);
        let ratio = coarse / fine;
        assert!((3.2..4.8).contains(&ratio), "ratio {ratio} ({coarse} -> {fine})");
    }

    #[test]
    fn rejects_divergent_initial_field() {
        let grid = Arc::new(Grid::<f64>::periodic_square(8, 3, 0.1).unwrap());
        let space = Arc::new(grid.spatial());
        let init = VectorField::from_fn(&space, |x, _, i| x[i].sin());
        assert!(march_reduced(&init, &SolveConfig::default(), &grid).is_err());
    }
}
