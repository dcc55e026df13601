//! Reproducible input fields: seeded smooth random quartets, admissible
//! variations, surface data, and the regularized lid-driven cavity.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundary::SurfaceData;
use crate::field::{Boundary, FieldQuartet, Grid, ScalarField, VectorField};
use crate::scalar::{lit, Scalar};

const MODES: usize = 3;

/// A smooth random function of space and time: a few low Fourier modes
/// (periodic along Periodic axes) with random amplitudes and phases, and a
/// random linear drift in time.
#[derive(Clone, Debug)]
struct SmoothFn {
    terms: Vec<(f64, [f64; 3], f64)>,
    offset: f64,
    drift: f64,
}

impl SmoothFn {
    fn new<T: Scalar>(rng: &mut ChaCha8Rng, grid: &Grid<T>, amplitude: f64) -> Self {
        let terms = (0..MODES)
            .map(|_| {
                let mut k = [0.0; 3];
                for (a, slot) in k.iter_mut().enumerate().take(grid.dim()) {
                    let wave = rng.gen_range(0..=2) as f64;
                    let len = crate::scalar::to_f64(grid.extent(a));
                    *slot = match grid.boundary(a) {
                        Boundary::Periodic => std::f64::consts::TAU * wave / len,
                        Boundary::Wall => std::f64::consts::PI * (wave + rng.gen_range(0.0..1.0)) / len,
                    };
                }
                (amplitude * rng.gen_range(-1.0..1.0), k, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        Self { terms, offset: amplitude * rng.gen_range(-0.5..0.5), drift: rng.gen_range(-0.5..0.5) }
    }

    fn eval<T: Scalar>(&self, x: &[T], t: T) -> T {
        let t = crate::scalar::to_f64(t);
        let v = self.terms.iter().fold(self.offset, |acc, (a, k, phase)| {
            let arg = x.iter().zip(k).fold(*phase, |s, (&xi, &ki)| s + ki * crate::scalar::to_f64(xi));
            acc + a * arg.sin()
        });
        lit(v * (1.0 + self.drift * t))
    }
}

fn vector<T: Scalar>(grid: &Arc<Grid<T>>, fs: &[SmoothFn], weight: impl Fn(&[T], T) -> T) -> VectorField<T> {
    VectorField::from_fn(grid, |x, t, i| weight(x, t) * fs[i].eval(x, t))
}

fn functions<T: Scalar>(rng: &mut ChaCha8Rng, grid: &Grid<T>, count: usize) -> Vec<SmoothFn> {
    (0..count).map(|_| SmoothFn::new(rng, grid, 1.0)).collect()
}

/// Product over Wall axes of `4 x (L - x) / L^2`: one in the middle,
/// vanishing on walls.
pub fn wall_bump<T: Scalar>(grid: &Grid<T>, x: &[T]) -> T {
    (0..grid.dim())
        .filter(|&a| grid.boundary(a) == Boundary::Wall)
        .fold(T::one(), |acc, a| {
            let l = grid.extent(a);
            acc * lit::<T>(4.0) * x[a] * (l - x[a]) / (l * l)
        })
}

/// Independent smooth random fields for all four members.
pub fn random_quartet<T: Scalar>(grid: &Arc<Grid<T>>, seed: u64) -> FieldQuartet<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.dim();
    let fu = functions(&mut rng, grid, d);
    let fw = functions(&mut rng, grid, d);
    let fp = SmoothFn::new(&mut rng, grid, 1.0);
    let fr = SmoothFn::new(&mut rng, grid, 1.0);
    FieldQuartet {
        u: vector(grid, &fu, |_, _| T::one()),
        p: ScalarField::from_fn(grid, |x, t| fp.eval(x, t)),
        w: vector(grid, &fw, |_, _| T::one()),
        r: ScalarField::from_fn(grid, |x, t| fr.eval(x, t)),
    }
}

/// Random quartet with `u = w` and `p = r` on walls, and `u - w` of
/// relative size `split`.
pub fn random_admissible_quartet<T: Scalar>(grid: &Arc<Grid<T>>, seed: u64, split: T) -> FieldQuartet<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.dim();
    let base = functions(&mut rng, grid, d);
    let diff = functions(&mut rng, grid, d);
    let fp = SmoothFn::new(&mut rng, grid, 1.0);
    let fq = SmoothFn::new(&mut rng, grid, 1.0);
    let g = grid.clone();
    let mean = vector(grid, &base, |_, _| T::one());
    let half_diff = vector(grid, &diff, |x, _| split * wall_bump(&g, x));
    let p = ScalarField::from_fn(grid, |x, t| fp.eval(x, t));
    let q = ScalarField::from_fn(grid, |x, t| split * wall_bump(&g, x) * fq.eval(x, t));
    FieldQuartet { u: &mean + &half_diff, p: &p + &q, w: &mean - &half_diff, r: &p - &q }
}

/// Random variation admissible for the first variation: velocity parts
/// vanish on walls and agree at the first and last time levels; pressure
/// parts agree on walls.
pub fn random_direction<T: Scalar>(grid: &Arc<Grid<T>>, seed: u64) -> FieldQuartet<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d1e5);
    let d = grid.dim();
    let shared = functions(&mut rng, grid, d);
    let extra = functions(&mut rng, grid, d);
    let fp = SmoothFn::new(&mut rng, grid, 1.0);
    let fq = SmoothFn::new(&mut rng, grid, 1.0);
    let g = grid.clone();
    let tau = grid.tau();
    let interior_time = move |t: T| if g.is_steady() { T::one() } else { lit::<T>(4.0) * t * (tau - t) / (tau * tau) };
    let g2 = grid.clone();
    let g3 = grid.clone();
    let du = vector(grid, &shared, |x, _| wall_bump(&g2, x));
    let dw_extra = vector(grid, &extra, |x, t| wall_bump(&g2, x) * interior_time(t));
    let dp = ScalarField::from_fn(grid, |x, t| fp.eval(x, t));
    let dq = ScalarField::from_fn(grid, |x, t| wall_bump(&g3, x) * fq.eval(x, t));
    FieldQuartet { w: &du + &dw_extra, u: du, r: &dp + &dq, p: dp }
}

/// Random surface velocities whose `i`-th component does not depend on
/// `x_i`, so opposite faces carry equal and opposite flux.
pub fn random_surface<T: Scalar>(grid: &Arc<Grid<T>>, seed: u64) -> SurfaceData<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0bad_cafe);
    let d = grid.dim();
    let fu = functions(&mut rng, grid, d);
    let fw = functions(&mut rng, grid, d);
    let across = |fs: &[SmoothFn]| {
        VectorField::from_fn(grid, |x, t, i| {
            let mut y = x.to_vec();
            y[i] = T::zero();
            fs[i].eval(&y, t)
        })
    };
    SurfaceData::new(across(&fu), across(&fw)).expect("opposite faces cancel")
}

/// Lid-driven cavity velocity on a steady grid over the unit square: the
/// lid `x_1 = 1` moves with `16 x_0^2 (1 - x_0)^2` along axis 0, every
/// other wall is at rest, interior values are zero.
pub fn cavity_velocity<T: Scalar>(grid: &Arc<Grid<T>>) -> VectorField<T> {
    let top = grid.extent(1);
    let l = grid.extent(0);
    VectorField::from_fn(grid, |x, _, i| {
        let s = x[0] / l;
        if i == 0 && (x[1] - top).abs() <= lit::<T>(1e-12) * top {
            lit::<T>(16.0) * s * s * (T::one() - s) * (T::one() - s)
        } else {
            T::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_fields() {
        let g = Arc::new(Grid::<f64>::periodic_square(6, 3, 0.1).unwrap());
        let a = random_quartet(&g, 7);
        let b = random_quartet(&g, 7);
        let c = random_quartet(&g, 8);
        assert_eq!(a.u.comp(1).values(), b.u.comp(1).values());
        assert_ne!(a.p.values(), c.p.values());
    }

    #[test]
    fn admissible_quartet_agrees_on_walls() {
        let g = Arc::new(
            Grid::<f64>::new(vec![1.0, 2.0], vec![7, 8], vec![Boundary::Wall, Boundary::Periodic], 3, 0.1).unwrap(),
        );
        let q = random_admissible_quartet(&g, 3, 0.3);
        for k in (0..g.space_len()).filter(|&k| g.is_boundary_node(k)) {
            assert!((q.u.comp(0).at(1, k) - q.w.comp(0).at(1, k)).abs() < 1e-15);
            assert!((q.p.at(2, k) - q.r.at(2, k)).abs() < 1e-15);
        }
    }

    #[test]
    fn cavity_lid_profile() {
        let g = Arc::new(Grid::<f64>::steady(vec![1.0, 1.0], vec![5, 5], vec![Boundary::Wall; 2]).unwrap());
        let v = cavity_velocity(&g);
        assert_eq!(v.comp(0).at(0, g.space_index(&[2, 4])), 1.0);
        assert_eq!(v.comp(0).at(0, g.space_index(&[2, 3])), 0.0);
    }
}
