use std::io::Write;

use serde::Serialize;

use super::jacobian;
use crate::error::{domain, precondition, Result};
use crate::field::{integrate_space_slices, FieldQuartet, ScalarField, VectorField};
use crate::scalar::{lit, Scalar};

/// Halved differences `v = (u - w) / 2`, `q = (p - r) / 2`.
#[derive(Clone, Debug)]
pub struct DifferencePair<T> {
    pub v_bar: VectorField<T>,
    pub q_bar: ScalarField<T>,
}

pub fn difference_fields<T: Scalar>(state: &FieldQuartet<T>) -> DifferencePair<T> {
    let half = lit::<T>(0.5);
    DifferencePair {
        v_bar: state.u.zip_with(&state.w, |a, b| (a - b) * half),
        q_bar: state.p.zip_with(&state.r, |a, b| (a - b) * half),
    }
}

/// Energy `E(t)` of the difference velocity and the right-hand side of its
/// evolution law `dE/dt = 2 int [nu (dv_i/dx_j)^2 - 1/2 v_i v_j d(u_j + w_j)/dx_i]`.
#[derive(Clone, Debug, Serialize)]
pub struct EnergySeries<T> {
    pub t: Vec<T>,
    #[serde(rename = "E")]
    pub e: Vec<T>,
    pub rhs: Vec<T>,
    /// `|dE/dt - rhs|` with central differences; absent at the end levels.
    pub identity_mismatch: Vec<Option<T>>,
    /// Largest eigenvalue of the symmetrized gradient of `u + w` over all
    /// nodes and times.
    pub m: T,
    /// Largest per-level sum of the absolute integrals entering `rhs` and `m E`.
    pub scale: T,
}

impl<T: Scalar> EnergySeries<T> {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "E", "rhs", "mismatch"])?;
        for n in 0..self.t.len() {
            let mismatch = self.identity_mismatch[n].map(|v| v.to_string()).unwrap_or_default();
            w.write_record([self.t[n].to_string(), self.e[n].to_string(), self.rhs[n].to_string(), mismatch])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Largest mismatch over interior levels.
    pub fn max_mismatch(&self) -> Option<T> {
        self.identity_mismatch.iter().flatten().copied().reduce(T::max)
    }
}

fn eigmax_sym2<T: Scalar>(a: T, b: T, d: T) -> T {
    let half = lit::<T>(0.5);
    let mean = (a + d) * half;
    let dev = (a - d) * half;
    mean + (dev * dev + b * b).sqrt()
}

/// Largest eigenvalue of a symmetric 3x3 matrix by the trigonometric
/// solution of the characteristic cubic.
fn eigmax_sym3<T: Scalar>(s: [[T; 3]; 3]) -> T {
    let p1 = s[0][1] * s[0][1] + s[0][2] * s[0][2] + s[1][2] * s[1][2];
    let q = (s[0][0] + s[1][1] + s[2][2]) / lit(3.0);
    if p1 == T::zero() {
        return s[0][0].max(s[1][1]).max(s[2][2]);
    }
    let p2 = (0..3).map(|i| (s[i][i] - q) * (s[i][i] - q)).fold(T::zero(), |a, b| a + b) + lit::<T>(2.0) * p1;
    let p = (p2 / lit(6.0)).sqrt();
    let mut b = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let shift = if i == j { q } else { T::zero() };
            b[i][j] = (s[i][j] - shift) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det * lit(0.5)).max(-T::one()).min(T::one());
    let phi = r.acos() / lit(3.0);
    q + lit::<T>(2.0) * p * phi.cos()
}

/// Largest eigenvalue of `1/2 (ds_j/dx_i + ds_i/dx_j)` over all nodes.
pub fn max_deformation_eigenvalue<T: Scalar>(s: &VectorField<T>) -> T {
    let ds = jacobian(s);
    let dim = s.dim();
    let half = lit::<T>(0.5);
    let len = s.grid().len();
    let mut best = T::neg_infinity();
    for k in 0..len {
        let sym = |i: usize, j: usize| (ds[i][j].values()[k] + ds[j][i].values()[k]) * half;
        let e = match dim {
            1 => sym(0, 0),
            2 => eigmax_sym2(sym(0, 0), sym(0, 1), sym(1, 1)),
            _ => eigmax_sym3([
                [sym(0, 0), sym(0, 1), sym(0, 2)],
                [sym(1, 0), sym(1, 1), sym(1, 2)],
                [sym(2, 0), sym(2, 1), sym(2, 2)],
            ]),
        };
        best = best.max(e);
    }
    best
}

fn check_wall_trace<T: Scalar>(state: &FieldQuartet<T>, v: &VectorField<T>) -> Result<()> {
    let g = v.grid();
    if !g.has_wall() {
        return Ok(());
    }
    let tol = lit::<T>(1e-12) * state.u.max_abs().max(state.w.max_abs()).max(T::one());
    let mut worst: Option<(T, usize, usize)> = None;
    for n in 0..g.time_nodes() {
        for k in (0..g.space_len()).filter(|&k| g.is_boundary_node(k)) {
            let mag = v.comps().iter().map(|c| c.at(n, k).abs()).fold(T::zero(), T::max);
            if worst.is_none_or(|(w, _, _)| mag > w) {
                worst = Some((mag, n, k));
            }
        }
    }
    match worst {
        Some((mag, n, k)) if mag > tol => Err(precondition(format!(
            "difference velocity must vanish on walls; worst node {:?} at t = {} has |v| = {mag}",
            g.space_multi(k),
            g.time(n)
        ))),
        _ => Ok(()),
    }
}

/// Energy series of the difference velocity. On wall grids `v` must vanish
/// on the boundary.
pub fn energy_series<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<EnergySeries<T>> {
    state.check_grids()?;
    if nu < T::zero() {
        return Err(domain(format!("viscosity must be non-negative, got {nu}")));
    }
    let g = state.grid().clone();
    let v = difference_fields(state).v_bar;
    check_wall_trace(state, &v)?;
    let s = &state.u + &state.w;
    let dim = g.dim();
    let len = g.len();
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let dv = jacobian(&v);
    let ds = jacobian(&s);
    let mut energy = vec![T::zero(); len];
    let mut dissipation = vec![T::zero(); len];
    let mut transfer = vec![T::zero(); len];
    let mut transfer_abs = vec![T::zero(); len];
    for i in 0..dim {
        let vi = v.comp(i).values();
        for k in 0..len {
            energy[k] = energy[k] + vi[k] * vi[k];
        }
        for j in 0..dim {
            let vj = v.comp(j).values();
            let dvij = dv[i][j].values();
            let dsji = ds[j][i].values();
            for k in 0..len {
                dissipation[k] = dissipation[k] + dvij[k] * dvij[k];
                let t = half * vi[k] * vj[k] * dsji[k];
                transfer[k] = transfer[k] + t;
                transfer_abs[k] = transfer_abs[k] + t.abs();
            }
        }
    }
    let field = |v: Vec<T>| ScalarField::from_parts(g.clone(), v);
    let e = integrate_space_slices(&field(energy));
    let diss = integrate_space_slices(&field(dissipation));
    let tr = integrate_space_slices(&field(transfer));
    let tr_abs = integrate_space_slices(&field(transfer_abs));
    let m = max_deformation_eigenvalue(&s);
    let nt = g.time_nodes();
    let rhs: Vec<T> = (0..nt).map(|n| two * (nu * diss[n] - tr[n])).collect();
    let identity_mismatch = (0..nt)
        .map(|n| {
            (n > 0 && n + 1 < nt).then(|| {
                let de = (e[n + 1] - e[n - 1]) / (two * g.dt());
                (de - rhs[n]).abs()
            })
        })
        .collect();
    let scale = (0..nt)
        .map(|n| two * (nu * diss[n] + tr_abs[n]) + two * m.abs() * e[n])
        .fold(T::zero(), T::max);
    Ok(EnergySeries { t: (0..nt).map(|n| g.time(n)).collect(), e, rhs, identity_mismatch, m, scale })
}

/// Checks of the exponential energy bound.
#[derive(Clone, Debug, Serialize)]
pub struct GronwallReport<T> {
    /// `rhs(t) + 2 m E(t)` per time level.
    pub margins: Vec<T>,
    pub min_margin: T,
    pub tolerance: T,
    pub pointwise_holds: bool,
    /// `E(t) exp(2 m t)` per time level.
    pub profile: Vec<T>,
    /// Smallest forward difference of `profile`; `None` on a single level.
    pub min_forward_difference: Option<T>,
}

pub fn gronwall_audit<T: Scalar>(series: &EnergySeries<T>) -> GronwallReport<T> {
    let two = lit::<T>(2.0);
    let margins: Vec<T> = series.e.iter().zip(&series.rhs).map(|(&e, &r)| r + two * series.m * e).collect();
    let min_margin = margins.iter().copied().fold(T::infinity(), T::min);
    let tolerance = lit::<T>(1e-10) * series.scale;
    let profile: Vec<T> = series.e.iter().zip(&series.t).map(|(&e, &t)| e * (two * series.m * t).exp()).collect();
    let min_forward_difference = profile.windows(2).map(|w| w[1] - w[0]).reduce(T::min);
    GronwallReport {
        pointwise_holds: min_margin >= -tolerance,
        margins,
        min_margin,
        tolerance,
        profile,
        min_forward_difference,
    }
}
