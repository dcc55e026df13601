use std::f64::consts::TAU;
use std::sync::Arc;

use varns_core::boundary::{boundary_recovery_audit, extended_functional, SurfaceData};
use varns_core::field::{Boundary, FieldQuartet, Grid, ScalarField, VectorField};
use varns_core::lagrangian::evaluate_lagrangian;
use varns_core::scenario::{random_quartet, random_surface, wall_bump};

fn trapezoid(m: usize, h: f64, periodic: bool) -> Vec<f64> {
    let mut w = vec![h; m];
    if !periodic && m > 1 {
        w[0] = 0.5 * h;
        w[m - 1] = 0.5 * h;
    }
    w
}

/// Surface flux density when the surface data equal the traces of `u`, `w`:
/// only the pressure and cubic terms survive,
/// `M_j = -u_j p + w_j r + (u_j |u|^2 + |u|^2 w_j - w_j |w|^2 - |w|^2 u_j) / 4`.
fn trace_density(q: &FieldQuartet<f64>, n: usize, k: usize, j: usize) -> f64 {
    let u = [q.u.comp(0).at(n, k), q.u.comp(1).at(n, k)];
    let w = [q.w.comp(0).at(n, k), q.w.comp(1).at(n, k)];
    let (uu, ww) = (u[0] * u[0] + u[1] * u[1], w[0] * w[0] + w[1] * w[1]);
    -u[j] * q.p.at(n, k) + w[j] * q.r.at(n, k) + 0.25 * (u[j] * uu + uu * w[j] - w[j] * ww - ww * u[j])
}

/// Outward flux of the trace density through the walls of a 2D grid,
/// integrated in time by the trapezoid rule.
fn trace_surface_term(q: &FieldQuartet<f64>) -> f64 {
    let g = q.grid();
    let wt = if g.is_steady() { vec![1.0] } else { trapezoid(g.time_nodes(), g.dt(), false) };
    let mut total = 0.0;
    for axis in 0..2 {
        if g.boundary(axis) != Boundary::Wall {
            continue;
        }
        let other = 1 - axis;
        let tw = trapezoid(g.nodes(other), g.spacing(other), g.boundary(other) == Boundary::Periodic);
        for (side, sign) in [(0, -1.0), (g.nodes(axis) - 1, 1.0)] {
            for (i, &weight) in tw.iter().enumerate() {
                let mut idx = [0; 2];
                idx[axis] = side;
                idx[other] = i;
                let k = g.space_index(&idx);
                for (n, &dt) in wt.iter().enumerate() {
                    total += sign * dt * weight * trace_density(q, n, k, axis);
                }
            }
        }
    }
    total
}

/// Random quartet whose wall values are flux-balanced surface data.
fn balanced_quartet(g: &Arc<Grid<f64>>, seed: u64) -> FieldQuartet<f64> {
    let interior = random_quartet(g, seed);
    let s = random_surface(g, seed + 100);
    let bump = ScalarField::from_fn(g, |x, _| wall_bump(g, x));
    let mix = |f: &VectorField<f64>, s: &VectorField<f64>| {
        VectorField::new((0..g.dim()).map(|i| f.comp(i).zip_with(&bump, |a, b| a * b).zip_with(s.comp(i), |a, b| a + b)).collect())
            .unwrap()
    };
    FieldQuartet::new(mix(&interior.u, &s.u_s), interior.p, mix(&interior.w, &s.w_s), interior.r).unwrap()
}

fn trace(q: &FieldQuartet<f64>) -> SurfaceData<f64> {
    SurfaceData::new(q.u.clone(), q.w.clone()).unwrap()
}

#[test]
fn trace_surface_term_matches_independent_quadrature() {
    let grids = [
        Grid::<f64>::steady(vec![1.0, 0.8], vec![9, 7], vec![Boundary::Wall; 2]).unwrap(),
        Grid::<f64>::new(vec![1.0, TAU], vec![8, 6], vec![Boundary::Wall, Boundary::Periodic], 4, 0.05).unwrap(),
        Grid::<f64>::new(vec![TAU, 1.0], vec![6, 7], vec![Boundary::Periodic, Boundary::Wall], 3, 0.1).unwrap(),
    ];
    for (i, g) in grids.into_iter().enumerate() {
        let g = Arc::new(g);
        for seed in 0..3 {
            let q = balanced_quartet(&g, seed);
            let r = extended_functional(&q, &trace(&q), 0.4).unwrap();
            let oracle = trace_surface_term(&q);
            assert!((r.surface_term - oracle).abs() <= 1e-12 * r.scale, "grid {i} seed {seed}: {} vs {oracle}", r.surface_term);
            assert!((r.i - r.j - r.surface_term).abs() <= 1e-14 * r.scale);
            assert_eq!(r.j, evaluate_lagrangian(&q, 0.4).unwrap().j);
        }
    }
}

#[test]
fn periodic_grids_have_no_surface_term() {
    let g = Arc::new(Grid::<f64>::periodic_square(8, 3, 0.1).unwrap());
    let q = random_quartet(&g, 4);
    let r = extended_functional(&q, &random_surface(&g, 5), 0.2).unwrap();
    assert_eq!(r.surface_term, 0.0);
    assert_eq!(r.i, r.j);
}

#[test]
fn symmetric_state_with_trace_surface_has_zero_extension() {
    let g = Arc::new(Grid::<f64>::steady(vec![1.0, 1.0], vec![9, 9], vec![Boundary::Wall; 2]).unwrap());
    let base = balanced_quartet(&g, 2);
    let q = FieldQuartet::symmetric(base.u, base.p).unwrap();
    let r = extended_functional(&q, &trace(&q), 0.7).unwrap();
    assert!(r.i.abs() <= 1e-13 * r.scale.max(1.0));
}

#[test]
fn recovery_audit_passes_on_traces_and_fails_on_mismatch() {
    let g = Arc::new(Grid::<f64>::steady(vec![1.0, 1.0], vec![9, 9], vec![Boundary::Wall; 2]).unwrap());
    let base = balanced_quartet(&g, 6);
    let q = FieldQuartet::new(base.u, base.p, VectorField::zeros(&g), base.r).unwrap();
    let exact = boundary_recovery_audit(&q, &trace(&q), 0.5).unwrap();
    assert!(exact.passes(1e-12));
    let off = boundary_recovery_audit(&q, &random_surface(&g, 7), 0.5).unwrap();
    assert!(!off.passes(1e-3));
}
