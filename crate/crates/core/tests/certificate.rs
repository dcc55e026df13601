use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use varns_core::field::{Boundary, FieldQuartet, Grid, ScalarField, VectorField};
use varns_core::scenario::random_quartet;
use varns_core::steady::{enclosing_radius, poincare_constant, uniqueness_certificate};

fn walled(extents: Vec<f64>, n: usize) -> Arc<Grid<f64>> {
    let dim = extents.len();
    Arc::new(Grid::steady(extents, vec![n; dim], vec![Boundary::Wall; dim]).unwrap())
}

fn sine_mode(g: &Arc<Grid<f64>>, amplitude: f64) -> FieldQuartet<f64> {
    let u = VectorField::from_fn(g, |x, _, i| if i == 0 { amplitude * (PI * x[0]).sin() * (PI * x[1]).sin() } else { 0.0 });
    FieldQuartet::symmetric(u, ScalarField::zeros(g)).unwrap()
}

#[test]
fn enclosing_radius_of_boxes() {
    let cases = [
        (vec![1.0, 1.0], 2f64.sqrt() / 2.0),
        (vec![1.0, 1.0, 1.0], 3f64.sqrt() / 2.0),
        (vec![2.0, 1.0], 5f64.sqrt() / 2.0),
    ];
    for (extents, expected) in cases {
        assert!((enclosing_radius(&*walled(extents, 5)) - expected).abs() <= 1e-15);
    }
    assert!((poincare_constant(0.5f64) - 80.0).abs() <= 1e-13);
}

#[test]
fn threshold_is_the_same_for_every_box() {
    let expected = 20f64.powf(0.25) * 3f64.powf(0.75);
    for extents in [vec![1.0, 1.0], vec![3.0, 0.5], vec![1.0, 2.0, 0.7]] {
        let g = walled(extents, 5);
        let c = uniqueness_certificate(&random_quartet(&g, 1), 0.3).unwrap();
        assert!((c.threshold - expected).abs() <= 1e-13, "{}", c.threshold);
        assert_eq!(c.nominal_threshold, 3.0);
    }
}

#[test]
fn dirichlet_norm_of_sine_mode_converges() {
    // u = w = (sin pi x sin pi y, 0): 1/4 int |grad(u + w)|^2 = pi^2 / 2
    let nu = 2.0;
    let errors: Vec<f64> = [33, 65, 129]
        .iter()
        .map(|&n| {
            let g = walled(vec![1.0, 1.0], n);
            let c = uniqueness_certificate(&sine_mode(&g, 1.0), nu).unwrap();
            let lhs = (0.5f64).sqrt().sqrt() / nu * (PI * PI / 2.0).sqrt();
            assert!((c.lhs - lhs).abs() <= 2e-2 * lhs);
            assert!(c.satisfied);
            (c.dirichlet_norm_sum - PI * PI / 2.0).abs()
        })
        .collect();
    assert!(errors[2] <= 1e-3, "{errors:?}");
    for w in errors.windows(2) {
        assert!((3.3..=4.7).contains(&(w[0] / w[1])), "{errors:?}");
    }
}

#[test]
fn fast_flow_fails_the_certificate() {
    let g = walled(vec![1.0, 1.0], 17);
    assert!(uniqueness_certificate(&sine_mode(&g, 1.0), 2.0).unwrap().satisfied);
    assert!(!uniqueness_certificate(&sine_mode(&g, 100.0), 2.0).unwrap().satisfied);
    assert!(uniqueness_certificate(&sine_mode(&g, 0.0), 1e-6).unwrap().satisfied);
}

#[test]
fn certificate_rejects_bad_inputs() {
    let g = walled(vec![1.0, 1.0], 7);
    assert!(uniqueness_certificate(&sine_mode(&g, 1.0), 0.0).is_err());
    let unsteady = Arc::new(Grid::new(vec![1.0, 1.0], vec![7, 7], vec![Boundary::Wall; 2], 3, 0.1).unwrap());
    assert!(uniqueness_certificate(&random_quartet(&unsteady, 0), 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lhs_is_homogeneous(seed in any::<u64>(), c in -5.0f64..5.0, nu in 0.05f64..3.0) {
        let g = walled(vec![1.0, 0.8], 9);
        let q = random_quartet(&g, seed);
        let scaled = FieldQuartet::new(q.u.scale(c), q.p.clone(), q.w.scale(c), q.r.clone()).unwrap();
        let base = uniqueness_certificate(&q, nu).unwrap();
        let s = uniqueness_certificate(&scaled, nu).unwrap();
        prop_assert!((s.lhs - c.abs() * base.lhs).abs() <= 1e-12 * base.lhs.max(1.0) * c.abs().max(1.0));
        let slow = uniqueness_certificate(&q, 2.0 * nu).unwrap();
        prop_assert!((2.0 * slow.lhs - base.lhs).abs() <= 1e-12 * base.lhs.max(1.0));
    }
}
