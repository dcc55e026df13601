use std::f64::consts::TAU;
use std::sync::Arc;

use proptest::prelude::*;
use varns_core::field::{Boundary, FieldQuartet, Grid, ScalarField, VectorField};
use varns_core::lagrangian::{
    difference_fields, el_residuals, evaluate_lagrangian, first_variation, swap_functional,
};
use varns_core::scenario::{random_direction, random_quartet};
use varns_core::steady::steady_functional;

/// Second-order derivative of `f` along spatial `axis` at `(n, idx)`,
/// written out independently of the library stencils.
fn d_space(f: &ScalarField<f64>, n: usize, idx: [usize; 2], axis: usize) -> f64 {
    let g = f.grid();
    let m = g.nodes(axis);
    let h = g.spacing(axis);
    let at = |j: usize| {
        let mut id = idx;
        id[axis] = j;
        f.at(n, g.space_index(&id))
    };
    let i = idx[axis];
    match g.boundary(axis) {
        Boundary::Periodic => (at((i + 1) % m) - at((i + m - 1) % m)) / (2.0 * h),
        Boundary::Wall if i == 0 => (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h),
        Boundary::Wall if i == m - 1 => (3.0 * at(m - 1) - 4.0 * at(m - 2) + at(m - 3)) / (2.0 * h),
        Boundary::Wall => (at(i + 1) - at(i - 1)) / (2.0 * h),
    }
}

fn d_time(f: &ScalarField<f64>, n: usize, k: usize) -> f64 {
    let g = f.grid();
    let (nt, dt) = (g.time_nodes(), g.dt());
    if n == 0 {
        (-3.0 * f.at(0, k) + 4.0 * f.at(1, k) - f.at(2, k)) / (2.0 * dt)
    } else if n == nt - 1 {
        (3.0 * f.at(n, k) - 4.0 * f.at(n - 1, k) + f.at(n - 2, k)) / (2.0 * dt)
    } else {
        (f.at(n + 1, k) - f.at(n - 1, k)) / (2.0 * dt)
    }
}

fn trapezoid(m: usize, h: f64, periodic: bool) -> Vec<f64> {
    let mut w = vec![h; m];
    if !periodic {
        w[0] = 0.5 * h;
        w[m - 1] = 0.5 * h;
    }
    w
}

/// Straight-line evaluation of the dual functional on a 2D grid:
/// `nu/2 |grad u|^2 - nu/2 |grad w|^2 + 1/2 (w_i + u_i) u_j dw_i/dx_j
///  - 1/2 (u_i + w_i) w_j du_i/dx_j + u.grad p - w.grad r
///  + 1/2 u.dw/dt - 1/2 w.du/dt`, integrated by trapezoid/rectangle rules.
fn brute_force_j(q: &FieldQuartet<f64>, nu: f64) -> f64 {
    let g = q.grid();
    let (n0, n1) = (g.nodes(0), g.nodes(1));
    let w0 = trapezoid(n0, g.spacing(0), g.boundary(0) == Boundary::Periodic);
    let w1 = trapezoid(n1, g.spacing(1), g.boundary(1) == Boundary::Periodic);
    let wt = if g.is_steady() { vec![1.0] } else { trapezoid(g.time_nodes(), g.dt(), false) };
    let mut total = 0.0;
    for n in 0..g.time_nodes() {
        for i0 in 0..n0 {
            for i1 in 0..n1 {
                let idx = [i0, i1];
                let k = g.space_index(&idx);
                let u = |i: usize| q.u.comp(i).at(n, k);
                let w = |i: usize| q.w.comp(i).at(n, k);
                let du = |i: usize, j: usize| d_space(q.u.comp(i), n, idx, j);
                let dw = |i: usize, j: usize| d_space(q.w.comp(i), n, idx, j);
                let mut l = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        l += 0.5 * nu * (du(i, j).powi(2) - dw(i, j).powi(2));
                        l += 0.5 * (w(i) + u(i)) * u(j) * dw(i, j);
                        l -= 0.5 * (u(i) + w(i)) * w(j) * du(i, j);
                    }
                    l += u(i) * d_space(&q.p, n, idx, i) - w(i) * d_space(&q.r, n, idx, i);
                    if !g.is_steady() {
                        l += 0.5 * u(i) * d_time(q.w.comp(i), n, k) - 0.5 * w(i) * d_time(q.u.comp(i), n, k);
                    }
                }
                total += wt[n] * w0[i0] * w1[i1] * l;
            }
        }
    }
    total
}

fn tg_velocity_only(nu: f64) -> FieldQuartet<f64> {
    let g = Arc::new(Grid::periodic_square(32, 9, 0.05).unwrap());
    let u = VectorField::from_fn(&g, |x, t, i| {
        let d = (-2.0 * nu * t).exp();
        if i == 0 {
            -x[0].cos() * x[1].sin() * d
        } else {
            x[0].sin() * x[1].cos() * d
        }
    });
    FieldQuartet::new(u, ScalarField::zeros(&g), VectorField::zeros(&g), ScalarField::zeros(&g)).unwrap()
}

#[test]
fn taylor_green_against_w_zero_matches_brute_force() {
    let nu = 0.1;
    let q = tg_velocity_only(nu);
    let j = evaluate_lagrangian(&q, nu).unwrap().j;
    let oracle = brute_force_j(&q, nu);
    assert!((j - oracle).abs() <= 1e-12 * oracle.abs(), "{j} vs {oracle}");
}

#[test]
fn random_walled_state_matches_brute_force() {
    let g = Arc::new(Grid::new(vec![1.0, 0.7], vec![9, 7], vec![Boundary::Wall, Boundary::Periodic], 5, 0.04).unwrap());
    for seed in 0..3 {
        let q = random_quartet(&g, seed);
        let j = evaluate_lagrangian(&q, 0.3).unwrap().j;
        let oracle = brute_force_j(&q, 0.3);
        assert!((j - oracle).abs() <= 1e-12 * oracle.abs(), "seed {seed}: {j} vs {oracle}");
    }
}

#[test]
fn steady_functional_matches_brute_force() {
    let g = Arc::new(Grid::steady(vec![1.0, 1.0], vec![11, 10], vec![Boundary::Wall; 2]).unwrap());
    let q = random_quartet(&g, 5);
    let js = steady_functional(&q, 0.2).unwrap();
    let oracle = brute_force_j(&q, 0.2);
    assert!((js - oracle).abs() <= 1e-12 * oracle.abs(), "{js} vs {oracle}");
}

#[test]
fn slices_integrate_to_j_and_breakdown_sums() {
    let q = tg_velocity_only(0.1);
    let r = evaluate_lagrangian(&q, 0.1).unwrap();
    let dt = q.grid().dt();
    let n = r.slices.len();
    let trap: f64 = r.slices.iter().enumerate().map(|(i, s)| if i == 0 || i == n - 1 { 0.5 * dt * s } else { dt * s }).sum();
    assert!((trap - r.j).abs() <= 1e-13 * r.magnitude);
    let b = r.breakdown;
    assert!((b.viscous + b.advective + b.pressure + b.temporal - r.j).abs() <= 1e-13 * r.magnitude);
}

#[test]
fn constant_fields_are_stationary_to_quadrature_order() {
    let mut variations = Vec::new();
    for level in 0..3 {
        let (n, nt, dt) = (8 << level, (4 << level) + 1, 0.1 / (1 << level) as f64);
        let g = Arc::new(Grid::new(vec![1.0, 1.0], vec![n, n], vec![Boundary::Wall, Boundary::Periodic], nt, dt).unwrap());
        let u = VectorField::from_fn(&g, |_, _, i| [0.4, -1.3][i]);
        let q = FieldQuartet::symmetric(u, ScalarField::constant(&g, 2.0)).unwrap();
        assert!(el_residuals(&q, 0.7).unwrap().max_abs() <= 1e-11);
        let dir = random_direction(&g, 3);
        let dj: f64 = first_variation(&q, &dir, 0.7).unwrap();
        variations.push(dj.abs());
    }
    for pair in variations.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(ratio >= 3.2, "{variations:?}");
    }
}

#[test]
fn difference_fields_reconstruct_the_state() {
    let g = Arc::new(Grid::<f64>::periodic_square(8, 3, 0.1).unwrap());
    let q = random_quartet(&g, 9);
    let d = difference_fields(&q);
    let rebuilt = |w: &ScalarField<f64>, half: &ScalarField<f64>, orig: &ScalarField<f64>| {
        let err = w.values().iter().zip(half.values()).zip(orig.values()).map(|((w, h), o)| (w + 2.0 * h - o).abs());
        err.fold(0.0, f64::max)
    };
    for i in 0..2 {
        assert!(rebuilt(q.w.comp(i), d.v_bar.comp(i), q.u.comp(i)) <= 1e-15);
    }
    assert!(rebuilt(&q.r, &d.q_bar, &q.p) <= 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn swap_negates_j_for_any_state(seed in any::<u64>(), nu in 0.0f64..2.0, nt in 3usize..6) {
        let g = Arc::new(Grid::new(vec![TAU, 1.0], vec![8, 6], vec![Boundary::Periodic, Boundary::Wall], nt, 0.05).unwrap());
        let q = random_quartet(&g, seed);
        let r = evaluate_lagrangian(&q, nu).unwrap();
        let swapped = swap_functional(&q, nu).unwrap();
        prop_assert!((r.j + swapped).abs() <= 1e-12 * r.j.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn symmetric_quartets_have_zero_j(seed in any::<u64>(), nu in 0.0f64..2.0) {
        let g = Arc::new(Grid::new(vec![1.0, 1.0], vec![7, 7], vec![Boundary::Wall; 2], 4, 0.05).unwrap());
        let q = random_quartet(&g, seed);
        let fixed = FieldQuartet::symmetric(q.u.clone(), q.p.clone()).unwrap();
        let r = evaluate_lagrangian(&fixed, nu).unwrap();
        prop_assert!(r.j.abs() <= 1e-13 * r.magnitude);
    }

    #[test]
    fn first_variation_is_linear_in_direction(seed in any::<u64>(), a in -3.0f64..3.0) {
        let g = Arc::new(Grid::new(vec![1.0, TAU], vec![7, 6], vec![Boundary::Wall, Boundary::Periodic], 4, 0.05).unwrap());
        let q = random_quartet(&g, seed);
        let d1 = random_direction(&g, seed.wrapping_add(1));
        let d2 = random_direction(&g, seed.wrapping_add(2));
        let combined = d1.add_scaled(a, &d2);
        let lhs: f64 = first_variation(&q, &combined, 0.4).unwrap();
        let rhs: f64 = first_variation(&q, &d1, 0.4).unwrap() + a * first_variation(&q, &d2, 0.4).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (lhs.abs() + rhs.abs()).max(1.0));
    }
}
