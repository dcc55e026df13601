//! The dual-field functional `J`, its Euler-Lagrange residuals, first
//! variation, and the energy estimate for the difference fields.

mod energy;
mod functional;
mod residuals;
mod variation;

pub use energy::{
    difference_fields, energy_series, gronwall_audit, max_deformation_eigenvalue, DifferencePair, EnergySeries,
    GronwallReport,
};
pub use functional::{evaluate_lagrangian, lagrangian_density, swap_functional, LagrangianReport, TermBreakdown};
pub use residuals::{el_residuals, ElResiduals};
pub use variation::{first_variation, variation_gradient};

use crate::field::{gradient, ScalarField, VectorField};
use crate::scalar::Scalar;

/// `d[i][j] = d v_i / d x_j` for every component and axis.
pub(crate) fn jacobian<T: Scalar>(v: &VectorField<T>) -> Vec<Vec<ScalarField<T>>> {
    let dim = v.dim();
    v.comps()
        .iter()
        .map(|c| (0..dim).map(|j| gradient(c, j).expect("axis in range")).collect())
        .collect()
}
