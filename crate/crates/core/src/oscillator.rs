//! Two-field variational problem for the damped oscillator
//! `y'' + 2a y' + b y = 0` on `[0, 1]` with `y(0) = alpha`, `y(1) = beta`.
//!
//! The functional couples `y1` and `y2`; its Euler-Lagrange system is solved
//! directly on a uniform grid and compared with the closed-form solution.

use serde::Serialize;

use crate::error::{domain, precondition, Error, Result};
use crate::field::{Boundary, Stencil1d};
use crate::linalg::{DenseMatrix, Lu};
use crate::scalar::{count, lit, to_f64, Scalar};

/// Resonance is declared when `sqrt(b - a^2) / pi` is within this distance
/// of a positive integer.
pub const RESONANCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OscillatorProblem<T> {
    pub a: T,
    pub b: T,
    pub alpha: T,
    pub beta: T,
    pub n: usize,
}

impl<T: Scalar> OscillatorProblem<T> {
    pub fn new(a: T, b: T, alpha: T, beta: T, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(domain(format!("oscillator needs at least 4 nodes, got {n}")));
        }
        Ok(Self { a, b, alpha, beta, n })
    }

    pub fn with_nodes(&self, n: usize) -> Result<Self> {
        Self::new(self.a, self.b, self.alpha, self.beta, n)
    }

    /// The integer `m >= 1` with `b - a^2 = m^2 pi^2`, if any.
    pub fn resonance(&self) -> Option<i64> {
        let d = to_f64(self.b) - to_f64(self.a).powi(2);
        if d <= 0.0 {
            return None;
        }
        let ratio = d.sqrt() / std::f64::consts::PI;
        let m = ratio.round();
        (m >= 1.0 && (ratio - m).abs() < RESONANCE_TOL).then_some(m as i64)
    }

    pub fn well_posed(&self) -> bool {
        self.resonance().is_none()
    }

    pub fn spacing(&self) -> T {
        T::one() / count(self.n - 1)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n).map(|i| self.spacing() * count(i)).collect()
    }

    fn check_resonance(&self) -> Result<()> {
        match self.resonance() {
            Some(m) => Err(Error::Resonance { m, tol: RESONANCE_TOL }),
            None => Ok(()),
        }
    }

    /// Closed-form solution at `x`.
    pub fn analytic(&self, x: T) -> Result<T> {
        self.check_resonance()?;
        let (a, b) = (self.a, self.b);
        let d = b - a * a;
        let decay = |x: T| (-a * x).exp();
        // y = e^{-ax} (A f(x) + B g(x)) with f(0) = 1, g(0) = 0
        let (f, g): (Box<dyn Fn(T) -> T>, Box<dyn Fn(T) -> T>) = if d > T::zero() {
            let w = d.sqrt();
            (Box::new(move |x| (w * x).cos()), Box::new(move |x| (w * x).sin()))
        } else if d < T::zero() {
            let k = (-d).sqrt();
            (Box::new(move |x| (k * x).cosh()), Box::new(move |x| (k * x).sinh()))
        } else {
            (Box::new(|_| T::one()), Box::new(|x| x))
        };
        let coef_a = self.alpha;
        let coef_b = (self.beta / decay(T::one()) - coef_a * f(T::one())) / g(T::one());
        Ok(decay(x) * (coef_a * f(x) + coef_b * g(x)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillatorSolution<T> {
    pub x: Vec<T>,
    pub y1: Vec<T>,
    pub y2: Vec<T>,
    /// `(y1 + y2) / 2`
    pub y_mean: Vec<T>,
    /// `(y1 - y2) / 2`
    pub y_diff: Vec<T>,
    pub functional_value: T,
    /// Largest over smallest LU pivot; grows without bound near resonance.
    pub pivot_ratio: T,
}

struct Ops<T> {
    d1: Stencil1d<T>,
    d2: Stencil1d<T>,
    weights: Vec<T>,
}

impl<T: Scalar> Ops<T> {
    fn new(n: usize) -> Self {
        let h = T::one() / count(n - 1);
        let mut weights = vec![h; n];
        weights[0] = h * lit(0.5);
        weights[n - 1] = h * lit(0.5);
        Self {
            d1: Stencil1d::first_derivative(n, h, Boundary::Wall),
            d2: Stencil1d::second_derivative(n, h, Boundary::Wall),
            weights,
        }
    }

    fn apply(s: &Stencil1d<T>, y: &[T]) -> Vec<T> {
        s.apply_along(y, [1, y.len(), 1, 1], 1, false)
    }

    fn integrate(&self, f: impl Iterator<Item = T>) -> T {
        f.zip(&self.weights).fold(T::zero(), |acc, (v, &w)| acc + v * w)
    }
}

fn check_len<T: Scalar>(y1: &[T], y2: &[T], problem: &OscillatorProblem<T>) -> Result<()> {
    if y1.len() != problem.n || y2.len() != problem.n {
        return Err(domain(format!(
            "node arrays have lengths {} and {}, problem has {} nodes",
            y1.len(),
            y2.len(),
            problem.n
        )));
    }
    Ok(())
}

/// Trapezoid quadrature of
/// `1/2 [(y1'^2 - 2a y2' y1 - b y1^2) - (y2'^2 - 2a y1' y2 - b y2^2)]`.
pub fn oscillator_functional<T: Scalar>(y1: &[T], y2: &[T], problem: &OscillatorProblem<T>) -> Result<T> {
    check_len(y1, y2, problem)?;
    let ops = Ops::new(problem.n);
    let d1 = Ops::apply(&ops.d1, y1);
    let d2 = Ops::apply(&ops.d1, y2);
    let (a, b) = (problem.a, problem.b);
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let integrand = (0..problem.n).map(|i| {
        let first = d1[i] * d1[i] - two * a * d2[i] * y1[i] - b * y1[i] * y1[i];
        let second = d2[i] * d2[i] - two * a * d1[i] * y2[i] - b * y2[i] * y2[i];
        half * (first - second)
    });
    Ok(ops.integrate(integrand))
}

/// Solves the coupled Euler-Lagrange system
/// `y1'' + 2a y2' + b y1 = 0`, `y2'' + 2a y1' + b y2 = 0`
/// with both fields taking the boundary values of `y`.
pub fn solve_oscillator_vp<T: Scalar>(problem: &OscillatorProblem<T>) -> Result<OscillatorSolution<T>> {
    problem.check_resonance()?;
    let n = problem.n;
    let ops = Ops::new(n);
    let two = lit::<T>(2.0);
    // unknowns interleaved: (y1_i, y2_i) at 2i, 2i + 1
    let mut m = DenseMatrix::zeros(2 * n, 2 * n);
    let mut rhs = vec![T::zero(); 2 * n];
    for (field, other) in [(0usize, 1usize), (1, 0)] {
        for i in 0..n {
            let row = 2 * i + field;
            if i == 0 || i == n - 1 {
                m.set(row, row, T::one());
                rhs[row] = if i == 0 { problem.alpha } else { problem.beta };
                continue;
            }
            for &(j, c) in ops.d2.row(i) {
                m.add(row, 2 * j + field, c);
            }
            for &(j, c) in ops.d1.row(i) {
                m.add(row, 2 * j + other, two * problem.a * c);
            }
            m.add(row, row, problem.b);
        }
    }
    let lu = Lu::factor(m)?;
    let sol = lu.solve(&rhs);
    let y1: Vec<T> = (0..n).map(|i| sol[2 * i]).collect();
    let y2: Vec<T> = (0..n).map(|i| sol[2 * i + 1]).collect();
    let half = lit::<T>(0.5);
    let y_mean = y1.iter().zip(&y2).map(|(&a, &b)| (a + b) * half).collect();
    let y_diff = y1.iter().zip(&y2).map(|(&a, &b)| (a - b) * half).collect();
    let functional_value = oscillator_functional(&y1, &y2, problem)?;
    Ok(OscillatorSolution {
        x: problem.nodes(),
        y1,
        y2,
        y_mean,
        y_diff,
        functional_value,
        pivot_ratio: lu.pivot_ratio(),
    })
}

/// `|J(y1, y2) + 2 int ybar (y'' + 2a y' + b y) dx|` with `y` the mean and
/// `ybar` the half difference, both integrals by the same quadrature.
pub fn galerkin_identity_residual<T: Scalar>(y1: &[T], y2: &[T], problem: &OscillatorProblem<T>) -> Result<T> {
    check_len(y1, y2, problem)?;
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let n = problem.n;
    let y: Vec<T> = y1.iter().zip(y2).map(|(&a, &b)| (a + b) * half).collect();
    let ybar: Vec<T> = y1.iter().zip(y2).map(|(&a, &b)| (a - b) * half).collect();
    let scale = y1.iter().chain(y2).fold(T::one(), |m, v| m.max(v.abs()));
    let tol = lit::<T>(1e-12) * scale;
    if ybar[0].abs() > tol || ybar[n - 1].abs() > tol {
        return Err(precondition(format!(
            "half difference must vanish at both ends (got {} and {})",
            ybar[0],
            ybar[n - 1]
        )));
    }
    let ops = Ops::new(n);
    let dy = Ops::apply(&ops.d1, &y);
    let ddy = Ops::apply(&ops.d2, &y);
    let weighted = ops.integrate(
        (0..n).map(|i| ybar[i] * (ddy[i] + two * problem.a * dy[i] + problem.b * y[i])),
    );
    let j = oscillator_functional(y1, y2, problem)?;
    Ok((j + two * weighted).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(a: f64, b: f64, n: usize) -> OscillatorProblem<f64> {
        OscillatorProblem::new(a, b, 0.0, 1.0, n).unwrap()
    }

    #[test]
    fn identical_fields_give_zero_functional() {
        let p = problem(0.7, 3.0, 17);
        let y: Vec<f64> = p.nodes().iter().map(|x| x.sin() + 0.3).collect();
        assert_eq!(oscillator_functional(&y, &y, &p).unwrap(), 0.0);
    }

    #[test]
    fn swapping_negates_functional() {
        let p = problem(0.7, 3.0, 17);
        let y1: Vec<f64> = p.nodes().iter().map(|x| x.sin()).collect();
        let y2: Vec<f64> = p.nodes().iter().map(|x| x * x - 0.2).collect();
        let j = oscillator_functional(&y1, &y2, &p).unwrap();
        let js = oscillator_functional(&y2, &y1, &p).unwrap();
        assert!((j + js).abs() <= 1e-15 * j.abs());
    }

    #[test]
    fn functional_matches_closed_form() {
        // 1/2 int (1 - 4x^2) dx = -1/6
        let p = problem(0.0, 0.0, 201);
        let y1 = p.nodes();
        let y2: Vec<f64> = y1.iter().map(|x| x * x).collect();
        let j = oscillator_functional(&y1, &y2, &p).unwrap();
        assert!((j + 1.0 / 6.0).abs() < 1e-4, "J = {j}");
    }

    #[test]
    fn length_mismatch_is_domain_error() {
        let p = problem(0.0, 0.0, 8);
        assert!(matches!(oscillator_functional(&[0.0; 7], &[0.0; 8], &p), Err(Error::Domain(_))));
    }

    #[test]
    fn linear_solution_is_exact() {
        let s = solve_oscillator_vp(&problem(0.0, 0.0, 9)).unwrap();
        for (x, y) in s.x.iter().zip(&s.y_mean) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(s.y_diff.iter().all(|d| d.abs() < 1e-14));
    }

    #[test]
    fn resonance_reports_integer() {
        let p = problem(0.0, std::f64::consts::PI.powi(2), 16);
        assert!(matches!(solve_oscillator_vp(&p), Err(Error::Resonance { m: 1, .. })));
        let p = problem(1.0, 1.0 + 4.0 * std::f64::consts::PI.powi(2), 16);
        assert_eq!(p.resonance(), Some(2));
        assert_eq!(problem(1.0, 1.0, 16).resonance(), None);
        assert_eq!(problem(1.0, 20.0, 16).resonance(), None);
        assert_eq!(problem(0.0, 9.8696044, 16).resonance(), Some(1));
    }

    #[test]
    fn analytic_solution_satisfies_boundary_values() {
        for (a, b) in [(1.0, 20.0), (2.0, 1.0), (1.5, 2.25)] {
            let p = OscillatorProblem::<f64>::new(a, b, 0.3, -1.2, 8).unwrap();
            assert!((p.analytic(0.0).unwrap() - 0.3).abs() < 1e-14);
            assert!((p.analytic(1.0).unwrap() + 1.2).abs() < 1e-12);
        }
    }

    #[test]
    fn galerkin_residual_vanishes_for_equal_fields() {
        let p = problem(1.0, 3.0, 33);
        let y: Vec<f64> = p.nodes().iter().map(|x| x * x).collect();
        assert_eq!(galerkin_identity_residual(&y, &y, &p).unwrap(), 0.0);
    }

    #[test]
    fn galerkin_requires_vanishing_difference() {
        let p = problem(1.0, 3.0, 33);
        let y1: Vec<f64> = p.nodes().iter().map(|x| x + 0.1).collect();
        let y2 = p.nodes();
        assert!(matches!(galerkin_identity_residual(&y1, &y2, &p), Err(Error::Precondition(_))));
    }
}
