use std::sync::Arc;

use super::{u_w_gap, IterRecord, SolveConfig, SolveStatus, Trajectory};
use crate::error::{domain, precondition, Error, Result};
use crate::field::{boundary_integral, divergence, Boundary, FieldQuartet, Grid, ScalarField, VectorField};
use crate::lagrangian::{el_residuals, evaluate_lagrangian};
use crate::linalg::{cholesky_solve, SparseColumns};
use crate::scalar::{lit, Scalar};

/// Prescribed data of the time-dependent problem: the common initial
/// velocity of `u` and `w`, and their common values on Wall nodes.
#[derive(Clone, Debug)]
pub struct DualData<T> {
    /// Velocity at `t = 0`, on the spatial grid.
    pub initial: VectorField<T>,
    /// Velocity on Wall nodes at every level, on the space-time grid.
    /// Ignored on all-Periodic grids.
    pub wall: Option<VectorField<T>>,
}

impl<T: Scalar> DualData<T> {
    /// Takes the initial level of `q.u` and its wall trace.
    pub fn from_quartet(q: &FieldQuartet<T>) -> Self {
        let g = q.grid();
        let space = Arc::new(g.spatial());
        let initial = VectorField::new(
            q.u.comps().iter().map(|c| ScalarField::from_parts(space.clone(), c.slice(0).to_vec())).collect(),
        )
        .expect("components share the grid");
        Self { initial, wall: g.has_wall().then(|| q.u.clone()) }
    }

    fn check(&self, grid: &Arc<Grid<T>>) -> Result<()> {
        if **self.initial.grid() != grid.spatial() {
            return Err(domain("initial velocity must live on the spatial grid"));
        }
        let scale = self.initial.max_abs().max(T::one());
        let div = divergence(&self.initial).max_abs();
        if div > lit::<T>(1e-8) * scale {
            return Err(precondition(format!("initial velocity is not solenoidal: max |div| = {div}")));
        }
        if grid.has_wall() {
            let wall = self.wall.as_ref().ok_or_else(|| domain("wall grids need prescribed wall velocity"))?;
            if wall.grid() != grid {
                return Err(domain("wall velocity must live on the space-time grid"));
            }
            for n in 0..grid.time_nodes() {
                let net = boundary_integral(wall, n)?;
                if net.abs() > lit::<T>(1e-10) * wall.max_abs().max(T::one()) {
                    return Err(precondition(format!("wall velocity has net outflow {net} at t = {}", grid.time(n))));
                }
            }
        }
        Ok(())
    }
}

/// Flat layout of the unknowns: levels `1..nt`, then nodes, then the
/// `2 dim + 2` values `u_i, w_i, p, r`.
struct Layout<T> {
    grid: Arc<Grid<T>>,
    dim: usize,
    nv: usize,
    slen: usize,
    levels: usize,
}

impl<T: Scalar> Layout<T> {
    fn new(grid: &Arc<Grid<T>>) -> Self {
        let dim = grid.dim();
        Self { grid: grid.clone(), dim, nv: 2 * dim + 2, slen: grid.space_len(), levels: grid.time_nodes() - 1 }
    }

    fn len(&self) -> usize {
        self.levels * self.slen * self.nv
    }

    fn index(&self, n: usize, k: usize, var: usize) -> usize {
        ((n - 1) * self.slen + k) * self.nv + var
    }

    fn pack(&self, q: &FieldQuartet<T>) -> Vec<T> {
        let mut x = vec![T::zero(); self.len()];
        for n in 1..=self.levels {
            for k in 0..self.slen {
                for i in 0..self.dim {
                    x[self.index(n, k, i)] = q.u.comp(i).at(n, k);
                    x[self.index(n, k, self.dim + i)] = q.w.comp(i).at(n, k);
                }
                x[self.index(n, k, 2 * self.dim)] = q.p.at(n, k);
                x[self.index(n, k, 2 * self.dim + 1)] = q.r.at(n, k);
            }
        }
        x
    }

    /// Quartet from unknowns; level 0 takes the initial data, and its
    /// pressures are extrapolated from levels 1 and 2.
    fn unpack(&self, x: &[T], data: &DualData<T>) -> FieldQuartet<T> {
        let mut q = FieldQuartet::zeros(&self.grid);
        let two = lit::<T>(2.0);
        for k in 0..self.slen {
            for i in 0..self.dim {
                let g = data.initial.comp(i).at(0, k);
                q.u.comp_mut(i).set(0, k, g);
                q.w.comp_mut(i).set(0, k, g);
            }
            for n in 1..=self.levels {
                for i in 0..self.dim {
                    q.u.comp_mut(i).set(n, k, x[self.index(n, k, i)]);
                    q.w.comp_mut(i).set(n, k, x[self.index(n, k, self.dim + i)]);
                }
                q.p.set(n, k, x[self.index(n, k, 2 * self.dim)]);
                q.r.set(n, k, x[self.index(n, k, 2 * self.dim + 1)]);
            }
            q.p.set(0, k, two * q.p.at(1, k) - q.p.at(2, k));
            q.r.set(0, k, two * q.r.at(1, k) - q.r.at(2, k));
        }
        q
    }
}

/// Sign patterns spanning the null space of the discrete gradient: the
/// constant, and the alternating mode along every even Periodic axis.
pub(crate) fn gauge_patterns<T: Scalar>(grid: &Grid<T>) -> Vec<Vec<T>> {
    let mut patterns = vec![vec![T::one(); grid.space_len()]];
    for a in 0..grid.dim() {
        if grid.boundary(a) != Boundary::Periodic || !grid.nodes(a).is_multiple_of(2) {
            continue;
        }
        let extra: Vec<Vec<T>> = patterns
            .iter()
            .map(|p| {
                (0..grid.space_len())
                    .map(|k| if grid.space_multi(k)[a].is_multiple_of(2) { p[k] } else { -p[k] })
                    .collect()
            })
            .collect();
        patterns.extend(extra);
    }
    patterns
}

/// Wall axis along which a boundary node extrapolates its pressure, with
/// the inward step in flat index.
pub(crate) fn inward<T: Scalar>(grid: &Grid<T>, k: usize) -> (usize, usize) {
    let m = grid.space_multi(k);
    for a in 0..grid.dim() {
        if grid.boundary(a) != Boundary::Wall {
            continue;
        }
        let n = grid.nodes(a);
        if m[a] == 0 || m[a] == n - 1 {
            let mut one = m;
            let mut two = m;
            if m[a] == 0 {
                one[a] = 1;
                two[a] = 2;
            } else {
                one[a] = n - 2;
                two[a] = n - 3;
            }
            return (grid.space_index(&one[..grid.dim()]), grid.space_index(&two[..grid.dim()]));
        }
    }
    unreachable!("node {k} is not on a wall")
}

struct System<'a, T: Scalar> {
    layout: Layout<T>,
    data: &'a DualData<T>,
    patterns: Vec<Vec<T>>,
    gauge_r: bool,
}

impl<T: Scalar> System<'_, T> {
    /// Stacked residual: Euler-Lagrange rows at interior nodes of levels
    /// `1..nt`, wall conditions, pressure gauges, and `u = w` at `t = tau`.
    fn residual(&self, x: &[T], nu: T) -> Vec<T> {
        let l = &self.layout;
        let g = &l.grid;
        let q = l.unpack(x, self.data);
        let el = el_residuals(&q, nu).expect("validated viscosity");
        let mut out = Vec::with_capacity(l.len() + l.slen * l.dim + 8 * l.levels);
        for n in 1..=l.levels {
            for k in 0..l.slen {
                if g.is_boundary_node(k) {
                    let wall = self.data.wall.as_ref().expect("checked for wall grids");
                    for i in 0..l.dim {
                        let f = wall.comp(i).at(n, k);
                        out.push(q.u.comp(i).at(n, k) - f);
                        out.push(q.w.comp(i).at(n, k) - f);
                    }
                    out.push(q.p.at(n, k) - q.r.at(n, k));
                    let (k1, k2) = inward(g, k);
                    out.push(q.p.at(n, k) - lit::<T>(2.0) * q.p.at(n, k1) + q.p.at(n, k2));
                } else {
                    for i in 0..l.dim {
                        out.push(el.res_u.comp(i).at(n, k));
                        out.push(el.res_w.comp(i).at(n, k));
                    }
                    out.push(el.res_div_u.at(n, k));
                    out.push(el.res_div_w.at(n, k));
                }
            }
            for pat in &self.patterns {
                let dot = |f: &ScalarField<T>| pat.iter().zip(f.slice(n)).fold(T::zero(), |a, (&s, &v)| a + s * v);
                out.push(dot(&q.p));
                if self.gauge_r {
                    out.push(dot(&q.r));
                }
            }
        }
        let last = l.levels;
        for k in 0..l.slen {
            for i in 0..l.dim {
                out.push(q.u.comp(i).at(last, k) - q.w.comp(i).at(last, k));
            }
        }
        out
    }
}

/// Exact Jacobian columns of a residual that is at most quadratic in the
/// unknowns: the central difference with unit step has no truncation error.
pub(crate) fn quadratic_jacobian<T: Scalar>(residual: &dyn Fn(&[T]) -> Vec<T>, x: &[T], rows: usize) -> SparseColumns<T> {
    let half = lit::<T>(0.5);
    let mut xp = x.to_vec();
    let cols = (0..x.len())
        .map(|c| {
            let orig = xp[c];
            xp[c] = orig + T::one();
            let plus = residual(&xp);
            xp[c] = orig - T::one();
            let minus = residual(&xp);
            xp[c] = orig;
            plus.iter()
                .zip(&minus)
                .enumerate()
                .filter_map(|(i, (&a, &b))| {
                    let v = (a - b) * half;
                    (v != T::zero()).then_some((i, v))
                })
                .collect()
        })
        .collect();
    SparseColumns { rows, cols }
}

pub(crate) fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt()
}

/// Damped Gauss-Newton: each step solves `(J^T J + shift I) d = -J^T R`
/// and is halved until the residual norm strictly decreases. `shift` maps
/// the current residual norm and the largest diagonal of `J^T J` to the
/// added multiple of the identity. `observe` sees every accepted iterate.
pub(crate) fn gauss_newton<T: Scalar>(
    residual: &dyn Fn(&[T]) -> Vec<T>,
    x: &mut Vec<T>,
    tol: T,
    max_iter: usize,
    shift: &dyn Fn(T, T) -> T,
    observe: &mut dyn FnMut(&[T], T) -> Result<()>,
) -> Result<SolveStatus> {
    let mut r = residual(x);
    let mut rn = norm(&r);
    let mut norms = vec![rn];
    for _ in 0..max_iter {
        if rn <= tol {
            return Ok(SolveStatus::Converged);
        }
        let jac = quadratic_jacobian(residual, x, r.len());
        let (mut a, rhs) = jac.normal_equations(&r, T::zero());
        let diag_max = (0..a.rows()).map(|i| a.get(i, i)).fold(T::zero(), T::max);
        let mu = shift(rn, diag_max);
        for i in 0..a.rows() {
            a.add(i, i, mu);
        }
        let step = cholesky_solve(a, &rhs).map_err(|e| {
            Error::Numerical(format!("{e}; the Jacobian is singular, try more continuation_steps"))
        })?;
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<T> = x.iter().zip(&step).map(|(&a, &d)| a + alpha * d).collect();
            let tr = residual(&trial);
            let tn = norm(&tr);
            if tn < rn {
                *x = trial;
                r = tr;
                rn = tn;
                accepted = true;
                break;
            }
            alpha = alpha * lit(0.5);
        }
        observe(x, rn)?;
        norms.push(rn);
        if !accepted {
            return Ok(SolveStatus::Stagnated);
        }
        let n = norms.len();
        if n > 100 && rn > lit::<T>(0.999) * norms[n - 101] {
            return Ok(SolveStatus::Stagnated);
        }
    }
    Ok(if rn <= tol { SolveStatus::Converged } else { SolveStatus::MaxIterations })
}


/// Viscosity ladder: `10 nu` halved `continuation_steps - 1` times (never
/// below `nu`), then `nu`.
fn ladder(nu: f64, steps: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..steps).map(|s| (10.0 * nu / 2f64.powi(s as i32)).max(nu)).collect();
    out.push(nu);
    out.dedup();
    out
}

/// Gauss-Newton on the monolithic space-time Euler-Lagrange system of the
/// dual functional, with halving line search and viscosity continuation.
///
/// Unknowns are `u, w, p, r` on every level after the first; the first level
/// carries the initial data. The system is overdetermined (the terminal
/// condition `u = w` is added to a square set of rows) but consistent, so
/// each step solves the normal equations.
pub fn newton_dual<T: Scalar>(
    seed: &FieldQuartet<T>,
    data: &DualData<T>,
    config: &SolveConfig,
    grid: &Arc<Grid<T>>,
) -> Result<Trajectory<T>> {
    config.validate()?;
    seed.check_grids()?;
    if seed.grid() != grid {
        return Err(domain("seed must live on the solver grid"));
    }
    if grid.time_nodes() < 3 {
        return Err(domain("the dual solve needs at least 3 time levels"));
    }
    data.check(grid)?;
    let layout = Layout::new(grid);
    let system = System {
        patterns: gauge_patterns(grid),
        gauge_r: !grid.has_wall(),
        layout,
        data,
    };
    let mut x = system.layout.pack(seed);
    let target: T = config.nu();
    let mut history = Vec::new();
    let mut record = |x: &[T], res: T| -> Result<()> {
        let q = system.layout.unpack(x, data);
        let j = evaluate_lagrangian(&q, target)?.j;
        history.push(IterRecord { iter: history.len(), residual: res, u_w_gap: u_w_gap(&q), j: Some(j) });
        Ok(())
    };
    let tol = lit::<T>(config.newton_tol);
    let mut status = SolveStatus::MaxIterations;
    for (stage, stage_nu) in ladder(config.nu, config.continuation_steps).into_iter().enumerate() {
        let nu = lit::<T>(stage_nu);
        let residual = |x: &[T]| system.residual(x, nu);
        if stage == 0 {
            record(&x, norm(&residual(&x)))?;
        }
        let shift = |_: T, diag_max: T| diag_max * lit(1e-14);
        status = gauss_newton(&residual, &mut x, tol, config.max_newton, &shift, &mut record)?;
        if status != SolveStatus::Converged {
            break;
        }
    }
    Ok(Trajectory { quartet: system.layout.unpack(&x, data), history, status })
}
