use std::sync::Arc;

use crate::error::{domain, Result};
use crate::field::{FieldQuartet, Grid, ScalarField, VectorField};
use crate::scalar::{lit, Scalar};

/// Taylor-Green velocity component `i` at `(x, y, t)`:
/// `(-cos x sin y, sin x cos y) exp(-2 nu t)`.
pub fn taylor_green_velocity<T: Scalar>(x: T, y: T, t: T, nu: T, i: usize) -> T {
    let decay = (lit::<T>(-2.0) * nu * t).exp();
    if i == 0 {
        -x.cos() * y.sin() * decay
    } else {
        x.sin() * y.cos() * decay
    }
}

/// Physical Taylor-Green pressure `-(cos 2x + cos 2y)/4 exp(-4 nu t)`.
pub fn taylor_green_pressure<T: Scalar>(x: T, y: T, t: T, nu: T) -> T {
    let two = lit::<T>(2.0);
    -lit::<T>(0.25) * ((two * x).cos() + (two * y).cos()) * (lit::<T>(-4.0) * nu * t).exp()
}

/// Kinetic energy `1/2 int |u|^2` of the Taylor-Green flow on `[0, 2 pi)^2`.
pub fn taylor_green_energy<T: Scalar>(t: T, nu: T) -> T {
    T::PI() * T::PI() * (lit::<T>(-4.0) * nu * t).exp()
}

pub(crate) fn check_periodic_box<T: Scalar>(grid: &Grid<T>) -> Result<()> {
    let tau = T::TAU();
    let ok = grid.dim() == 2
        && grid.all_periodic()
        && grid.extents().iter().all(|&e| (e - tau).abs() <= lit::<T>(1e-6) * tau);
    if !ok {
        return Err(domain("Taylor-Green flow needs a 2D all-Periodic grid on [0, 2 pi)^2"));
    }
    Ok(())
}

/// Symmetric quartet `u = w`, `p = r = P - |u|^2 / 2` of the decaying
/// Taylor-Green vortex.
pub fn taylor_green<T: Scalar>(nu: T, grid: &Arc<Grid<T>>) -> Result<FieldQuartet<T>> {
    check_periodic_box(grid)?;
    let u = VectorField::from_fn(grid, |x, t, i| taylor_green_velocity(x[0], x[1], t, nu, i));
    let p = ScalarField::from_fn(grid, |x, t| {
        let (a, b) = (taylor_green_velocity(x[0], x[1], t, nu, 0), taylor_green_velocity(x[0], x[1], t, nu, 1));
        taylor_green_pressure(x[0], x[1], t, nu) - lit::<T>(0.5) * (a * a + b * b)
    });
    FieldQuartet::symmetric(u, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{divergence, Boundary};

    #[test]
    fn origin_is_stagnation_point() {
        let g = Arc::new(Grid::<f64>::periodic_square(8, 3, 0.1).unwrap());
        let q = taylor_green(0.1, &g).unwrap();
        assert_eq!(q.u.comp(0).at(0, 0), 0.0);
        assert_eq!(q.u.comp(1).at(0, 0), 0.0);
        assert!(divergence(&q.u).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_other_grids() {
        let g = Arc::new(Grid::<f64>::steady(vec![1.0, 1.0], vec![5, 5], vec![Boundary::Periodic; 2]).unwrap());
        assert!(taylor_green(0.1, &g).is_err());
        let g = Arc::new(
            Grid::<f64>::steady(vec![std::f64::consts::TAU; 2], vec![5, 5], vec![Boundary::Wall; 2]).unwrap(),
        );
        assert!(taylor_green(0.1, &g).is_err());
    }
}
