//! Solvers producing fields at or near the stationary point of the dual
//! functional.

mod march;
mod newton;
mod spectral;
mod steady;
mod taylor_green;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::field::FieldQuartet;
use crate::scalar::Scalar;

pub use march::march_reduced;
pub use newton::{newton_dual, DualData};
pub use steady::{steady_solve, SteadyData};
pub use taylor_green::{taylor_green, taylor_green_energy, taylor_green_pressure, taylor_green_velocity};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeScheme {
    #[default]
    CrankNicolson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub nu: f64,
    /// Threshold on the residual 2-norm for Newton-type iterations, and on
    /// the steady residual for pseudo-time marching.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Number of viscosity-continuation stages before the target viscosity.
    pub continuation_steps: usize,
    pub time_scheme: TimeScheme,
    /// Relative tolerance of inner (Picard) iterations.
    pub linear_tol: f64,
    /// Maximum Picard sweeps per time step of the reduced solver.
    pub picard_max: usize,
    /// Pseudo-time step of the steady solver.
    pub pseudo_dt: f64,
    pub max_pseudo_steps: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            nu: 0.1,
            newton_tol: 1e-10,
            max_newton: 25,
            continuation_steps: 0,
            time_scheme: TimeScheme::CrankNicolson,
            linear_tol: 1e-12,
            picard_max: 50,
            pseudo_dt: 0.05,
            max_pseudo_steps: 20000,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(domain(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.newton_tol > 0.0) || !(self.linear_tol > 0.0) || !(self.pseudo_dt > 0.0) {
            return Err(domain("tolerances and the pseudo-time step must be positive"));
        }
        if self.max_newton == 0 || self.picard_max == 0 {
            return Err(domain("iteration limits must be at least 1"));
        }
        Ok(())
    }

    pub(crate) fn nu<T: Scalar>(&self) -> T {
        crate::scalar::lit(self.nu)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// No accepted step could reduce the residual, or it plateaued.
    Stagnated,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IterRecord<T> {
    pub iter: usize,
    pub residual: T,
    /// `|u - w|_2 / |u|_2`
    pub u_w_gap: T,
    #[serde(rename = "J")]
    pub j: Option<T>,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub quartet: FieldQuartet<T>,
    pub history: Vec<IterRecord<T>>,
    pub status: SolveStatus,
}

impl<T: Scalar> Trajectory<T> {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn write_history_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "residual", "u_w_gap", "J"])?;
        for r in &self.history {
            w.write_record([
                r.iter.to_string(),
                r.residual.to_string(),
                r.u_w_gap.to_string(),
                r.j.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `|u - w|_2 / |u|_2`, zero when both vanish.
pub fn u_w_gap<T: Scalar>(q: &FieldQuartet<T>) -> T {
    let diff = (&q.u - &q.w).l2_norm();
    let base = q.u.l2_norm();
    if base == T::zero() {
        if diff == T::zero() {
            T::zero()
        } else {
            T::infinity()
        }
    } else {
        diff / base
    }
}
