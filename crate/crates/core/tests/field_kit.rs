use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use proptest::prelude::*;
use varns_core::field::{
    boundary_integral, divergence, gradient, integrate_space, integrate_spacetime, laplacian, time_derivative,
    Boundary, Grid, ScalarField, VectorField,
};

fn ratios(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}

fn assert_second_order(errors: &[f64]) {
    for r in ratios(errors) {
        assert!((3.3..=4.7).contains(&r), "errors {errors:?}");
    }
}

fn max_error(f: &ScalarField<f64>, exact: impl Fn(&[f64], f64) -> f64) -> f64 {
    let g = f.grid();
    let mut err = 0f64;
    for n in 0..g.time_nodes() {
        for k in 0..g.space_len() {
            err = err.max((f.at(n, k) - exact(&g.position(k), g.time(n))).abs());
        }
    }
    err
}

#[test]
fn periodic_gradient_of_sine_is_second_order() {
    let errors: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| {
            let g = Arc::new(Grid::<f64>::steady(vec![1.0], vec![n], vec![Boundary::Periodic]).unwrap());
            let f = ScalarField::from_fn(&g, |x, _| (TAU * x[0]).sin());
            max_error(&gradient(&f, 0).unwrap(), |x, _| TAU * (TAU * x[0]).cos())
        })
        .collect();
    assert_second_order(&errors);
}

#[test]
fn wall_gradient_with_one_sided_ends_is_second_order() {
    let errors: Vec<f64> = [33, 65, 129]
        .iter()
        .map(|&n| {
            let g = Arc::new(Grid::<f64>::steady(vec![1.0, 1.0], vec![n, 9], vec![Boundary::Wall, Boundary::Periodic]).unwrap());
            let f = ScalarField::from_fn(&g, |x, _| (2.0 * x[0]).exp() * (TAU * x[1]).cos());
            max_error(&gradient(&f, 0).unwrap(), |x, _| 2.0 * (2.0 * x[0]).exp() * (TAU * x[1]).cos())
        })
        .collect();
    assert_second_order(&errors);
}

#[test]
fn laplacian_of_product_sines_is_second_order() {
    let errors: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let g = Arc::new(Grid::<f64>::periodic_square(n, 1, 1.0).unwrap());
            let f = ScalarField::from_fn(&g, |x, _| x[0].sin() * x[1].sin());
            max_error(&laplacian(&f), |x, _| -2.0 * x[0].sin() * x[1].sin())
        })
        .collect();
    assert_second_order(&errors);
}

#[test]
fn time_derivative_is_second_order_with_one_sided_ends() {
    let errors: Vec<f64> = [17, 33, 65]
        .iter()
        .map(|&nt| {
            let g = Arc::new(Grid::<f64>::new(vec![1.0], vec![4], vec![Boundary::Periodic], nt, 1.0 / (nt - 1) as f64).unwrap());
            let f = ScalarField::from_fn(&g, |_, t| (3.0 * t).sin());
            max_error(&time_derivative(&f).unwrap(), |_, t| 3.0 * (3.0 * t).cos())
        })
        .collect();
    assert_second_order(&errors);
}

#[test]
fn quadrature_examples() {
    let g = Arc::new(Grid::<f64>::steady(vec![1.0], vec![11], vec![Boundary::Wall]).unwrap());
    let f = ScalarField::from_fn(&g, |x, _| x[0]);
    assert!((integrate_space(&f, 0).unwrap() - 0.5).abs() < 1e-15);

    let g = Arc::new(Grid::<f64>::steady(vec![TAU], vec![24], vec![Boundary::Periodic]).unwrap());
    let f = ScalarField::from_fn(&g, |x, _| x[0].sin().powi(2));
    assert!((integrate_space(&f, 0).unwrap() - PI).abs() < 1e-13);

    let g = Arc::new(Grid::<f64>::new(vec![1.0], vec![5], vec![Boundary::Wall], 11, 0.1).unwrap());
    let f = ScalarField::from_fn(&g, |_, t| t);
    assert!((integrate_spacetime(&f) - 0.5).abs() < 1e-15);
}

#[test]
fn spacetime_quadrature_of_periodic_product_is_exact() {
    // int_0^1 sin^2(2 pi t) dt * int_0^{2pi} sin^2 x dx = pi / 2
    let errors: Vec<f64> = [9, 17, 33]
        .iter()
        .map(|&nt| {
            let g = Arc::new(
                Grid::<f64>::new(vec![TAU], vec![16], vec![Boundary::Periodic], nt, 1.0 / (nt - 1) as f64).unwrap(),
            );
            let f = ScalarField::from_fn(&g, |x, t| (TAU * t).sin().powi(2) * x[0].sin().powi(2));
            (integrate_spacetime(&f) - PI / 2.0).abs()
        })
        .collect();
    assert!(errors.iter().all(|&e| e < 1e-13), "{errors:?}");
}

#[test]
fn divergence_theorem_holds_to_second_order() {
    let errors: Vec<f64> = [9, 17, 33]
        .iter()
        .map(|&n| {
            let g = Arc::new(Grid::<f64>::steady(vec![1.0, 1.5], vec![n, n], vec![Boundary::Wall; 2]).unwrap());
            let v = VectorField::from_fn(&g, |x, _, i| {
                if i == 0 {
                    (x[0] * x[1]).exp()
                } else {
                    (2.0 * x[0] - x[1]).sin() * x[1]
                }
            });
            (integrate_space(&divergence(&v), 0).unwrap() - boundary_integral(&v, 0).unwrap()).abs()
        })
        .collect();
    assert_second_order(&errors);
}

#[test]
fn boundary_integral_of_linear_flux_matches_volume() {
    let g = Arc::new(Grid::<f64>::steady(vec![1.0, 1.0], vec![6, 6], vec![Boundary::Wall; 2]).unwrap());
    let v = VectorField::from_fn(&g, |x, _, i| if i == 0 { x[0] } else { 0.0 });
    assert!((boundary_integral(&v, 0).unwrap() - 1.0).abs() < 1e-14);
    let c = VectorField::from_fn(&g, |_, _, i| [2.0, -1.0][i]);
    assert!(boundary_integral(&c, 0).unwrap().abs() < 1e-15);
}

fn field(g: &Arc<Grid<f64>>, a: [f64; 4]) -> ScalarField<f64> {
    ScalarField::from_fn(g, move |x, t| a[0] * (a[1] * x[0] + t).sin() + a[2] * x[1] * x[1] + a[3] * x[0] * x[1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn operators_are_linear(
        a in prop::array::uniform4(-2.0f64..2.0),
        b in prop::array::uniform4(-2.0f64..2.0),
        s in -3.0f64..3.0,
        t in -3.0f64..3.0,
    ) {
        let g = Arc::new(Grid::<f64>::new(vec![1.0, TAU], vec![7, 8], vec![Boundary::Wall, Boundary::Periodic], 4, 0.1).unwrap());
        let (f, h) = (field(&g, a), field(&g, b));
        let combo = f.zip_with(&h, |x, y| s * x + t * y);
        let ops: [&dyn Fn(&ScalarField<f64>) -> ScalarField<f64>; 4] = [
            &|f| gradient(f, 0).unwrap(),
            &|f| gradient(f, 1).unwrap(),
            &|f| laplacian(f),
            &|f| time_derivative(f).unwrap(),
        ];
        for op in ops {
            let lhs = op(&combo);
            let rhs = op(&f).zip_with(&op(&h), |x, y| s * x + t * y);
            let scale = lhs.max_abs().max(1.0);
            prop_assert!((&lhs - &rhs).max_abs() <= 1e-12 * scale);
        }
    }
}
