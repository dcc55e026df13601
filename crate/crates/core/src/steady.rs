//! Steady functional, the inequality chain behind the uniqueness bound, and
//! the uniqueness certificate for steady dual fields.

use serde::Serialize;

use crate::error::{domain, precondition, Result};
use crate::field::{boundary_integral, integrate_space, FieldQuartet, Grid, ScalarField, VectorField};
use crate::lagrangian::{difference_fields, evaluate_lagrangian, LagrangianReport};
use crate::scalar::{lit, Scalar};

/// The rounded value the uniqueness threshold is usually quoted as.
pub const NOMINAL_THRESHOLD: f64 = 3.0;

fn require_steady<T: Scalar>(grid: &Grid<T>) -> Result<()> {
    if !grid.is_steady() {
        return Err(domain(format!(
            "steady quantities need a single time level, grid has {}",
            grid.time_nodes()
        )));
    }
    Ok(())
}

/// `J^s` with the full report (slice, term breakdown, magnitude).
pub fn steady_report<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<LagrangianReport<T>> {
    state.check_grids()?;
    require_steady(state.grid())?;
    evaluate_lagrangian(state, nu)
}

/// Spatial integral of the Lagrangian without time-derivative terms.
pub fn steady_functional<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<T> {
    Ok(steady_report(state, nu)?.j)
}

/// Radius of the smallest sphere enclosing the box domain.
pub fn enclosing_radius<T: Scalar>(grid: &Grid<T>) -> T {
    grid.enclosing_radius()
}

/// `lambda = 20 / R^2`.
pub fn poincare_constant<T: Scalar>(radius: T) -> T {
    lit::<T>(20.0) / (radius * radius)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct UniquenessCertificate<T> {
    pub lhs: T,
    /// `R^{1/2} lambda^{1/4} 3^{3/4}`; equals `20^{1/4} 3^{3/4}` for every `R`.
    pub threshold: T,
    pub nominal_threshold: f64,
    #[serde(rename = "R")]
    pub r: T,
    pub lambda: T,
    pub nu: T,
    /// `1/4 int (d(u_j + w_j)/dx_i)^2`
    pub dirichlet_norm_sum: T,
    pub satisfied: bool,
}

/// Squared gradient of `u + w`, summed over components and axes.
fn sum_gradient_squared<T: Scalar>(s: &VectorField<T>) -> ScalarField<T> {
    let mut acc = ScalarField::zeros(s.grid());
    for row in crate::lagrangian::jacobian(s) {
        for d in row {
            acc.axpy(T::one(), &d.hadamard(&d));
        }
    }
    acc
}

pub fn uniqueness_certificate<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<UniquenessCertificate<T>> {
    if nu <= T::zero() {
        return Err(domain(format!("viscosity must be positive, got {nu}")));
    }
    state.check_grids()?;
    let grid = state.grid();
    require_steady(grid)?;
    let s = &state.u + &state.w;
    let quarter = lit::<T>(0.25);
    let dirichlet_norm_sum = quarter * integrate_space(&sum_gradient_squared(&s), 0)?;
    let r = enclosing_radius(grid);
    let lambda = poincare_constant(r);
    let lhs = r.sqrt() / nu * dirichlet_norm_sum.sqrt();
    let threshold = r.sqrt() * lambda.powf(quarter) * lit::<T>(3.0).powf(lit(0.75));
    Ok(UniquenessCertificate {
        lhs,
        threshold,
        nominal_threshold: NOMINAL_THRESHOLD,
        r,
        lambda,
        nu,
        dirichlet_norm_sum,
        satisfied: lhs <= threshold,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityRow<T> {
    pub name: &'static str,
    pub lhs: T,
    pub rhs: T,
    /// `rhs - lhs`
    pub margin: T,
    /// Whether the row is expected to hold for arbitrary discrete data.
    pub asserted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityAudit<T> {
    pub rows: Vec<InequalityRow<T>>,
    /// Largest absolute side over all rows.
    pub scale: T,
    pub tolerance: T,
    /// Every asserted row has `margin >= -tolerance`.
    pub asserted_hold: bool,
}

impl<T: Scalar> InequalityAudit<T> {
    pub fn row(&self, name: &str) -> Option<&InequalityRow<T>> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["inequality", "lhs", "rhs", "margin", "asserted"])?;
        for r in &self.rows {
            w.write_record([
                r.name.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.margin.to_string(),
                r.asserted.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_difference_trace<T: Scalar>(state: &FieldQuartet<T>, v: &VectorField<T>) -> Result<()> {
    let g = v.grid();
    let tol = lit::<T>(1e-12) * state.u.max_abs().max(state.w.max_abs()).max(T::one());
    for k in (0..g.space_len()).filter(|&k| g.is_boundary_node(k)) {
        for c in v.comps() {
            if c.at(0, k).abs() > tol {
                return Err(precondition(format!(
                    "difference velocity must vanish on walls; node {:?} has component {}",
                    g.space_multi(k),
                    c.at(0, k)
                )));
            }
        }
    }
    Ok(())
}

/// Evaluates both sides of the steps bounding the transfer integral
/// `T = |int 1/2 v_i v_j d(u_j + w_j)/dx_i|` with `v = (u - w)/2`:
///
/// - `schwarz`: `T <= {int (v_i v_j)^2}^{1/2} G^{1/2}` (Cauchy-Schwarz, asserted)
/// - `serrin`: `T <= 3^{-3/4} E^{1/4} D^{3/4} G^{1/2}`
/// - `payne_weinberger`: `T <= 3^{-3/4} lambda^{-1/4} D G^{1/2}`
/// - `poincare`: `E <= D / lambda`, the step turning the second into the third
/// - `energy_balance`: `nu D` against `T`, equal at a steady stationary point
///
/// where `E = int v_i^2`, `D = int (dv_i/dx_j)^2`, `G = 1/4 int (d(u_j + w_j)/dx_i)^2`.
pub fn inequality_chain_audit<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<InequalityAudit<T>> {
    state.check_grids()?;
    let grid = state.grid().clone();
    require_steady(&grid)?;
    let v = difference_fields(state).v_bar;
    check_difference_trace(state, &v)?;
    let s = &state.u + &state.w;
    let dim = grid.dim();
    let len = grid.len();
    let half = lit::<T>(0.5);
    let quarter = lit::<T>(0.25);
    let ds = crate::lagrangian::jacobian(&s);
    let mut transfer = vec![T::zero(); len];
    let mut vv_sq = vec![T::zero(); len];
    for i in 0..dim {
        for j in 0..dim {
            let (vi, vj) = (v.comp(i).values(), v.comp(j).values());
            let dsj = ds[j][i].values();
            for k in 0..len {
                let a = vi[k] * vj[k];
                transfer[k] = transfer[k] + a * half * dsj[k];
                vv_sq[k] = vv_sq[k] + a * a;
            }
        }
    }
    let integral = |f: Vec<T>| integrate_space(&ScalarField::from_parts(grid.clone(), f), 0);
    let t = integral(transfer)?.abs();
    let vv = integral(vv_sq)?;
    let e = integrate_space(&v.norm_squared(), 0)?;
    let d = integrate_space(&sum_gradient_squared(&v), 0)?;
    let gsum = quarter * integrate_space(&sum_gradient_squared(&s), 0)?;
    let lambda = poincare_constant(enclosing_radius(&grid));
    let c = lit::<T>(3.0).powf(lit(-0.75));
    let row = |name, lhs: T, rhs: T, asserted| InequalityRow { name, lhs, rhs, margin: rhs - lhs, asserted };
    let rows = vec![
        row("schwarz", t, vv.sqrt() * gsum.sqrt(), true),
        row("serrin", t, c * e.powf(quarter) * d.powf(lit(0.75)) * gsum.sqrt(), false),
        row("payne_weinberger", t, c * lambda.powf(-quarter) * d * gsum.sqrt(), false),
        row("poincare", e, d / lambda, false),
        row("energy_balance", nu * d, t, false),
    ];
    let scale = rows.iter().fold(T::zero(), |m, r| m.max(r.lhs.abs()).max(r.rhs.abs()));
    let tolerance = lit::<T>(1e-10) * scale;
    let asserted_hold = rows.iter().filter(|r| r.asserted).all(|r| r.margin >= -tolerance);
    Ok(InequalityAudit { rows, scale, tolerance, asserted_hold })
}

/// Terms of the energy identity for `u + w` in a steady state and the
/// closing inequality bounding the Dirichlet norm by boundary data.
#[derive(Clone, Debug, Serialize)]
pub struct SteadyBoundaryEstimate<T> {
    /// `nu/4 int (d(u_i + w_i)/dx_j)^2`
    pub dirichlet: T,
    /// `1/4 surface int [p + r + (u_j + w_j)^2/4] (u_i + w_i) n_i`
    pub boundary: T,
    /// `1/4 int (u_i + w_i)(u_j + w_j) d(u_j + w_j)/dx_i`
    pub volume: T,
    /// `dirichlet + boundary - volume`; vanishes at a steady stationary point.
    pub identity_residual: T,
    /// `1/4 {nu - 3^{-3/4}/(4 lambda^{1/4}) int (ds)^2}^{1/2} int (ds)^2`;
    /// `None` when the bracket is negative.
    pub closing_lhs: Option<T>,
    /// `|boundary|`
    pub closing_rhs: T,
    pub closing_margin: Option<T>,
    /// False on all-Periodic grids, where the boundary integral is zero.
    pub has_boundary: bool,
}

pub fn steady_boundary_estimate<T: Scalar>(state: &FieldQuartet<T>, nu: T) -> Result<SteadyBoundaryEstimate<T>> {
    state.check_grids()?;
    let grid = state.grid().clone();
    require_steady(&grid)?;
    let s = &state.u + &state.w;
    let quarter = lit::<T>(0.25);
    let grad_sq = integrate_space(&sum_gradient_squared(&s), 0)?;
    let dirichlet = nu * quarter * grad_sq;
    let s_sq = s.norm_squared();
    let head = ScalarField::from_parts(
        grid.clone(),
        (0..grid.len())
            .map(|k| state.p.values()[k] + state.r.values()[k] + s_sq.values()[k] * quarter)
            .collect(),
    );
    let flux = s.map(|c| c.hadamard(&head));
    let boundary = quarter * boundary_integral(&flux, 0)?;
    let ds = crate::lagrangian::jacobian(&s);
    let mut vol = vec![T::zero(); grid.len()];
    for i in 0..grid.dim() {
        for j in 0..grid.dim() {
            let (si, sj, d) = (s.comp(i).values(), s.comp(j).values(), ds[j][i].values());
            for k in 0..vol.len() {
                vol[k] = vol[k] + si[k] * sj[k] * d[k];
            }
        }
    }
    let volume = quarter * integrate_space(&ScalarField::from_parts(grid.clone(), vol), 0)?;
    let lambda = poincare_constant(enclosing_radius(&grid));
    let bracket = nu - lit::<T>(3.0).powf(lit(-0.75)) / (lit::<T>(4.0) * lambda.powf(quarter)) * grad_sq;
    let closing_lhs = (bracket >= T::zero()).then(|| quarter * bracket.sqrt() * grad_sq);
    let closing_rhs = boundary.abs();
    Ok(SteadyBoundaryEstimate {
        dirichlet,
        boundary,
        volume,
        identity_residual: dirichlet + boundary - volume,
        closing_lhs,
        closing_rhs,
        closing_margin: closing_lhs.map(|l| closing_rhs - l),
        has_boundary: grid.has_wall(),
    })
}
