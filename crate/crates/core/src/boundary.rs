//! Surface term extending the dual functional so that the physical boundary
//! conditions come out of stationarity, and audits of those conditions.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::field::{
    boundary_integral, gradient, Face, FieldQuartet, Grid, ScalarField, Stencil1d, VectorField,
};
use crate::lagrangian::evaluate_lagrangian;
use crate::scalar::{lit, Scalar};

/// Tolerance on the net prescribed outflow through the boundary.
pub const MASS_TOL: f64 = 1e-10;

/// Prescribed surface velocities `u^s` and `w^s`. Stored as fields on the
/// full grid; only boundary-node values are read.
#[derive(Clone, Debug)]
pub struct SurfaceData<T> {
    pub u_s: VectorField<T>,
    pub w_s: VectorField<T>,
}

impl<T: Scalar> SurfaceData<T> {
    /// Checks that `u^s` carries no net flux through the boundary at any
    /// time level.
    pub fn new(u_s: VectorField<T>, w_s: VectorField<T>) -> Result<Self> {
        if !u_s.same_grid(&w_s) {
            return Err(domain("surface velocities live on different grids"));
        }
        let g = u_s.grid();
        let abs_flux = u_s.map(|c| c.map(|v| v.abs()));
        for n in 0..g.time_nodes() {
            let net = boundary_integral(&u_s, n)?;
            let size = surface_abs_flux(&abs_flux, n).max(T::one());
            if net.abs() > lit::<T>(MASS_TOL) * size {
                return Err(crate::error::precondition(format!(
                    "prescribed surface velocity has net outflow {net} at t = {}",
                    g.time(n)
                )));
            }
        }
        Ok(Self { u_s, w_s })
    }

    pub fn zeros(grid: &std::sync::Arc<Grid<T>>) -> Self {
        Self { u_s: VectorField::zeros(grid), w_s: VectorField::zeros(grid) }
    }

    /// `(w^s, u^s)`, the data matching a swapped quartet.
    pub fn swapped(&self) -> Self {
        Self { u_s: self.w_s.clone(), w_s: self.u_s.clone() }
    }
}

/// Surface density `M_j` at the boundary nodes (zero elsewhere), with the
/// nodes where the magnitude `|u - u^s + w - w^s|` vanishes and its
/// gradient was set to zero.
#[derive(Clone, Debug)]
pub struct SurfaceDensity<T> {
    pub m: VectorField<T>,
    /// `(time level, flat spatial index)` of every flagged node.
    pub degenerate_nodes: Vec<(usize, usize)>,
}

fn check_surface<T: Scalar>(state: &FieldQuartet<T>, surface: &SurfaceData<T>) -> Result<()> {
    state.check_grids()?;
    let g = state.grid();
    if surface.u_s.grid() != g || surface.u_s.dim() != g.dim() {
        return Err(domain("surface data does not match the state grid"));
    }
    Ok(())
}

/// Gradient of a node function at boundary node `k` of level `n`. Along
/// axes where `k` sits at a wall the derivative is one-sided and `value`
/// is evaluated with the surface data frozen at `k`; along other axes the
/// neighbours lie on the same face and use their own surface data. With
/// `face_axis` set, only that axis counts as normal, so at an edge or corner
/// the derivative along the face keeps each node's own surface data.
fn boundary_gradient<T: Scalar>(
    grid: &Grid<T>,
    stencils: &[Stencil1d<T>],
    k: usize,
    face_axis: Option<usize>,
    value: impl Fn(usize, usize) -> T,
) -> [T; 3] {
    let mut out = [T::zero(); 3];
    let idx = grid.space_multi(k);
    for (b, st) in stencils.iter().enumerate() {
        let at_wall = grid.boundary(b) == crate::field::Boundary::Wall && (idx[b] == 0 || idx[b] == grid.nodes(b) - 1);
        let normal = face_axis.map_or(at_wall, |a| a == b);
        out[b] = st.row(idx[b]).iter().fold(T::zero(), |acc, &(c, coef)| {
            let mut m = idx;
            m[b] = c;
            let kk = grid.space_index(&m[..grid.dim()]);
            let source = if normal { k } else { kk };
            acc + coef * value(kk, source)
        });
    }
    out
}

fn cross<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn pad<T: Scalar>(v: &VectorField<T>, n: usize, k: usize) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for (i, c) in v.comps().iter().enumerate() {
        out[i] = c.at(n, k);
    }
    out
}

fn magnitude<T: Scalar>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn stencils<T: Scalar>(g: &Grid<T>) -> Vec<Stencil1d<T>> {
    (0..g.dim()).map(|a| Stencil1d::first_derivative(g.nodes(a), g.spacing(a), g.boundary(a))).collect()
}

/// `-u^s_j p + (u_j |u|^2 + |u|^2 w_j)/4 - nu (u_i - u^s_i) du_i/dx_j`: the
/// terms of `M_j` carrying `u` as the primary field.
fn half_density<T: Scalar>(
    u: &VectorField<T>,
    p: &ScalarField<T>,
    u_s: &VectorField<T>,
    w: &VectorField<T>,
    du: &[Vec<ScalarField<T>>],
    nu: T,
    n: usize,
    k: usize,
) -> [T; 3] {
    let dim = u.dim();
    let quarter = lit::<T>(0.25);
    let uu = pad(u, n, k);
    let ww = pad(w, n, k);
    let us = pad(u_s, n, k);
    let u_sq = magnitude(uu).powi(2);
    let pk = p.at(n, k);
    let mut out = [T::zero(); 3];
    for j in 0..dim {
        let visc = (0..dim).fold(T::zero(), |acc, i| acc + (uu[i] - us[i]) * du[i][j].at(n, k));
        out[j] = -us[j] * pk + (uu[j] * u_sq + u_sq * ww[j]) * quarter - nu * visc;
    }
    out
}

/// Node-wise `M_j` on every Wall boundary node. The permutation-tensor term
/// is evaluated in three dimensions; on one- and two-dimensional grids it
/// points out of the domain's plane and contributes nothing in-plane.
pub fn surface_density<T: Scalar>(
    state: &FieldQuartet<T>,
    surface: &SurfaceData<T>,
    nu: T,
) -> Result<SurfaceDensity<T>> {
    check_surface(state, surface)?;
    let g = state.grid().clone();
    if !g.has_wall() {
        return Err(domain("surface density needs at least one Wall axis"));
    }
    let dim = g.dim();
    let jac = |v: &VectorField<T>| -> Vec<Vec<ScalarField<T>>> {
        v.comps().iter().map(|c| (0..dim).map(|a| gradient(c, a).expect("axis in range")).collect()).collect()
    };
    let du = jac(&state.u);
    let dw = jac(&state.w);
    let st = stencils(&g);
    let mut m = VectorField::zeros(&g);
    let mut degenerate_nodes = Vec::new();
    for n in 0..g.time_nodes() {
        let sum_dev = |kk: usize, src: usize| {
            let (u, us, w, ws) =
                (pad(&state.u, n, kk), pad(&surface.u_s, n, src), pad(&state.w, n, kk), pad(&surface.w_s, n, src));
            magnitude([0, 1, 2].map(|i| (u[i] - us[i]) + (w[i] - ws[i])))
        };
        for k in (0..g.space_len()).filter(|&k| g.is_boundary_node(k)) {
            let a = half_density(&state.u, &state.p, &surface.u_s, &state.w, &du, nu, n, k);
            let b = half_density(&state.w, &state.r, &surface.w_s, &state.u, &dw, nu, n, k);
            let grad_mag = if sum_dev(k, k) == T::zero() {
                degenerate_nodes.push((n, k));
                [T::zero(); 3]
            } else {
                boundary_gradient(&g, &st, k, None, sum_dev)
            };
            let (u, us, w, ws) =
                (pad(&state.u, n, k), pad(&surface.u_s, n, k), pad(&state.w, n, k), pad(&surface.w_s, n, k));
            let skew = [0, 1, 2].map(|i| (w[i] - ws[i]) - (u[i] - us[i]));
            // eps_ijk g_i b_k = (b x g)_j
            let rot = cross(skew, grad_mag);
            for j in 0..dim {
                m.comp_mut(j).set(n, k, (a[j] - b[j]) + nu * rot[j]);
            }
        }
    }
    Ok(SurfaceDensity { m, degenerate_nodes })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendedReport<T> {
    #[serde(rename = "J")]
    pub j: T,
    pub surface_term: T,
    #[serde(rename = "I")]
    pub i: T,
    /// Reference size for relative tolerances: the magnitude of `J` plus the
    /// time integral of the absolute surface fluxes.
    pub scale: T,
    pub degenerate_nodes: usize,
}

/// `I = J + int_0^tau surface int M_j n_j`. On all-Periodic grids the
/// surface term is zero.
pub fn extended_functional<T: Scalar>(
    state: &FieldQuartet<T>,
    surface: &SurfaceData<T>,
    nu: T,
) -> Result<ExtendedReport<T>> {
    check_surface(state, surface)?;
    let report = evaluate_lagrangian(state, nu)?;
    let g = state.grid();
    let (surface_term, surface_abs, degenerate) = if g.has_wall() {
        let d = surface_density(state, surface, nu)?;
        let abs = d.m.map(|c| c.map(|v| v.abs()));
        let tw = g.time_weights();
        let mut s = T::zero();
        let mut sa = T::zero();
        for (n, &w) in tw.iter().enumerate() {
            s = s + w * boundary_integral(&d.m, n)?;
            sa = sa + w * surface_abs_flux(&abs, n);
        }
        (s, sa, d.degenerate_nodes.len())
    } else {
        (T::zero(), T::zero(), 0)
    };
    Ok(ExtendedReport {
        j: report.j,
        surface_term,
        i: report.j + surface_term,
        scale: report.magnitude + surface_abs,
        degenerate_nodes: degenerate,
    })
}

fn surface_abs_flux<T: Scalar>(abs: &VectorField<T>, n: usize) -> T {
    abs.grid().boundary_faces().iter().fold(T::zero(), |acc, f| {
        acc + f.nodes.iter().zip(&f.weights).fold(T::zero(), |a, (&k, &w)| a + w * abs.comp(f.axis).at(n, k))
    })
}

/// Boundary checks at one node on one face, maximized over time levels.
#[derive(Clone, Debug, Serialize)]
pub struct AuditRow<T> {
    pub face: String,
    pub node: usize,
    /// `|n . (u - u^s)|`
    pub check_a: T,
    /// Magnitude of `n_i (u_i - u^s_i)(u_j - u^s_j) + nu n_i eps_ijk d|u - u^s|/dx_k`
    pub check_b: T,
    /// `|n . w|`
    pub check_c: T,
    /// `|w|`, only when `nu != 0`.
    pub check_d: Option<T>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryAudit<T> {
    pub rows: Vec<AuditRow<T>>,
    pub max_a: T,
    pub max_b: T,
    pub max_c: T,
    pub max_d: Option<T>,
    /// Largest nodal magnitude of `u`, `u^s`, `w` (at least 1).
    pub scale: T,
}

impl<T: Scalar> BoundaryAudit<T> {
    /// All applicable checks below `tol * scale`.
    pub fn passes(&self, tol: T) -> bool {
        let t = tol * self.scale;
        self.max_a <= t && self.max_b <= t && self.max_c <= t && self.max_d.is_none_or(|d| d <= t)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["face", "node", "check_a", "check_b", "check_c", "check_d"])?;
        for r in &self.rows {
            w.write_record([
                r.face.clone(),
                r.node.to_string(),
                r.check_a.to_string(),
                r.check_b.to_string(),
                r.check_c.to_string(),
                r.check_d.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn audit_face<T: Scalar>(
    state: &FieldQuartet<T>,
    surface: &SurfaceData<T>,
    nu: T,
    face: &Face<T>,
    stencils: &[Stencil1d<T>],
) -> Vec<AuditRow<T>> {
    let g = state.grid();
    let dim = g.dim();
    let mut normal = [T::zero(); 3];
    normal[..dim].copy_from_slice(&face.normal(dim));
    let dot = |a: [T; 3], b: [T; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    face.nodes
        .iter()
        .map(|&k| {
            let mut row = AuditRow {
                face: face.label(),
                node: k,
                check_a: T::zero(),
                check_b: T::zero(),
                check_c: T::zero(),
                check_d: (nu != T::zero()).then(T::zero),
            };
            for n in 0..g.time_nodes() {
                let u = pad(&state.u, n, k);
                let us = pad(&surface.u_s, n, k);
                let w = pad(&state.w, n, k);
                let dev = [0, 1, 2].map(|i| u[i] - us[i]);
                let nd = dot(normal, dev);
                let dev_mag = |kk: usize, src: usize| {
                    let (u, us) = (pad(&state.u, n, kk), pad(&surface.u_s, n, src));
                    magnitude([0, 1, 2].map(|i| u[i] - us[i]))
                };
                let grad = boundary_gradient(g, stencils, k, Some(face.axis), dev_mag);
                // n_i eps_ijk g_k = -(n x g)_j
                let rot = cross(normal, grad);
                let b = [0, 1, 2].map(|j| nd * dev[j] - nu * rot[j]);
                row.check_a = row.check_a.max(nd.abs());
                row.check_b = row.check_b.max(magnitude(b));
                row.check_c = row.check_c.max(dot(normal, w).abs());
                row.check_d = row.check_d.map(|d| d.max(magnitude(w)));
            }
            row
        })
        .collect()
}

/// Evaluates the boundary conditions a stationary point of the extended
/// functional must satisfy, node by node on every Wall face.
pub fn boundary_recovery_audit<T: Scalar>(
    state: &FieldQuartet<T>,
    surface: &SurfaceData<T>,
    nu: T,
) -> Result<BoundaryAudit<T>> {
    check_surface(state, surface)?;
    let g = state.grid();
    let st = stencils(g);
    let rows: Vec<AuditRow<T>> =
        g.boundary_faces().iter().flat_map(|f| audit_face(state, surface, nu, f, &st)).collect();
    let max = |f: &dyn Fn(&AuditRow<T>) -> T| rows.iter().map(f).fold(T::zero(), T::max);
    let max_d = (nu != T::zero()).then(|| max(&|r| r.check_d.unwrap_or(T::zero())));
    let scale = state.u.max_abs().max(state.w.max_abs()).max(surface.u_s.max_abs()).max(T::one());
    Ok(BoundaryAudit {
        max_a: max(&|r| r.check_a),
        max_b: max(&|r| r.check_b),
        max_c: max(&|r| r.check_c),
        max_d,
        scale,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::error::Error;
    use crate::field::Boundary;

    fn grid() -> Arc<Grid<f64>> {
        Arc::new(Grid::new(vec![1.0, 1.0], vec![7, 7], vec![Boundary::Wall; 2], 3, 0.1).unwrap())
    }

    #[test]
    fn zero_everything_is_zero() {
        let g = grid();
        let s = FieldQuartet::zeros(&g);
        let surf = SurfaceData::zeros(&g);
        let d = surface_density(&s, &surf, 0.5).unwrap();
        assert_eq!(d.m.max_abs(), 0.0);
        assert_eq!(extended_functional(&s, &surf, 0.5).unwrap().i, 0.0);
    }

    #[test]
    fn net_outflow_rejected() {
        let g = grid();
        let u_s = VectorField::from_fn(&g, |_, _, i| if i == 0 { 1.0 } else { 0.0 });
        assert!(SurfaceData::new(u_s.clone(), u_s).is_ok());
        let u_s = VectorField::from_fn(&g, |x, _, i| if i == 0 { x[0] } else { 0.0 });
        assert!(matches!(SurfaceData::new(u_s.clone(), u_s), Err(Error::Precondition(_))));
    }

    #[test]
    fn periodic_grid_has_no_surface_term() {
        let g = Arc::new(Grid::<f64>::periodic_square(6, 3, 0.1).unwrap());
        let u = VectorField::from_fn(&g, |x, _, i| (x[i]).sin());
        let s = FieldQuartet::new(u, ScalarField::zeros(&g), VectorField::zeros(&g), ScalarField::zeros(&g)).unwrap();
        let r = extended_functional(&s, &SurfaceData::zeros(&g), 0.1).unwrap();
        assert_eq!(r.i, r.j);
        assert!(surface_density(&s, &SurfaceData::zeros(&g), 0.1).is_err());
        assert!(boundary_recovery_audit(&s, &SurfaceData::zeros(&g), 0.1).unwrap().rows.is_empty());
    }

    #[test]
    fn density_negates_under_swap() {
        let g = grid();
        let u = VectorField::from_fn(&g, |x, t, i| (x[0] + 2.0 * x[1] + i as f64 + t).sin());
        let w = VectorField::from_fn(&g, |x, _, i| (x[1] - x[0] * i as f64).cos());
        let p = ScalarField::from_fn(&g, |x, _| x[0] * x[1]);
        let r = ScalarField::from_fn(&g, |x, _| x[0] - x[1]);
        let s = FieldQuartet::new(u, p, w, r).unwrap();
        let us = VectorField::from_fn(&g, |x, _, i| if i == 0 { x[1] } else { 0.3 });
        let ws = VectorField::from_fn(&g, |_, _, i| 0.1 * i as f64);
        let surf = SurfaceData { u_s: us, w_s: ws };
        let a = surface_density(&s, &surf, 0.4).unwrap();
        let b = surface_density(&s.swapped(), &surf.swapped(), 0.4).unwrap();
        for i in 0..2 {
            let sum = a.m.comp(i) + b.m.comp(i);
            assert_eq!(sum.max_abs(), 0.0);
        }
        let ia = extended_functional(&s, &surf, 0.4).unwrap();
        let ib = extended_functional(&s.swapped(), &surf.swapped(), 0.4).unwrap();
        assert_eq!(ia.i, -ib.i);
    }

    #[test]
    fn inviscid_audit_skips_check_d() {
        let g = grid();
        let u = VectorField::from_fn(&g, |x, _, i| x[i] * (1.0 - x[i]) * (1.0 + x[1 - i]));
        let s = FieldQuartet::new(u.clone(), ScalarField::zeros(&g), u, ScalarField::zeros(&g)).unwrap();
        let audit = boundary_recovery_audit(&s, &SurfaceData::zeros(&g), 0.0).unwrap();
        assert!(audit.max_d.is_none());
        assert_eq!(audit.max_a, 0.0);
        assert_eq!(audit.max_c, 0.0);
    }
}
