//! One-dimensional finite-difference matrices applied along one axis of a
//! space-time array.

use crate::field::Boundary;
use crate::scalar::{lit, Scalar};

/// Sparse 1D operator, one row per node.
#[derive(Clone, Debug)]
pub struct Stencil1d<T> {
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> Stencil1d<T> {
    /// Second-order first derivative: central inside, one-sided at Wall ends,
    /// wraparound on Periodic axes. Requires `n >= 3`.
    pub fn first_derivative(n: usize, h: T, boundary: Boundary) -> Self {
        debug_assert!(n >= 3);
        let c = T::one() / (h + h);
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let row = match boundary {
                Boundary::Periodic => vec![((i + n - 1) % n, -c), ((i + 1) % n, c)],
                Boundary::Wall if i == 0 => vec![(0, lit::<T>(-3.0) * c), (1, lit::<T>(4.0) * c), (2, -c)],
                Boundary::Wall if i == n - 1 => {
                    vec![(n - 3, c), (n - 2, lit::<T>(-4.0) * c), (n - 1, lit::<T>(3.0) * c)]
                }
                Boundary::Wall => vec![(i - 1, -c), (i + 1, c)],
            };
            rows.push(row);
        }
        Self { rows }
    }

    /// Second derivative: 3-point inside, 4-point one-sided (second order)
    /// at Wall ends when `n >= 4`, the shifted 3-point row otherwise.
    pub fn second_derivative(n: usize, h: T, boundary: Boundary) -> Self {
        debug_assert!(n >= 3);
        let c = T::one() / (h * h);
        let two = lit::<T>(2.0);
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let row = match boundary {
                Boundary::Periodic => {
                    vec![((i + n - 1) % n, c), (i, -two * c), ((i + 1) % n, c)]
                }
                Boundary::Wall if i == 0 && n >= 4 => vec![
                    (0, two * c),
                    (1, lit::<T>(-5.0) * c),
                    (2, lit::<T>(4.0) * c),
                    (3, -c),
                ],
                Boundary::Wall if i == n - 1 && n >= 4 => vec![
                    (n - 4, -c),
                    (n - 3, lit::<T>(4.0) * c),
                    (n - 2, lit::<T>(-5.0) * c),
                    (n - 1, two * c),
                ],
                Boundary::Wall if i == 0 => vec![(0, c), (1, -two * c), (2, c)],
                Boundary::Wall if i == n - 1 => vec![(n - 3, c), (n - 2, -two * c), (n - 1, c)],
                Boundary::Wall => vec![(i - 1, c), (i, -two * c), (i + 1, c)],
            };
            rows.push(row);
        }
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    /// Applies the operator (or its transpose) along position `pos` of an
    /// array with the given `[t, x0, x1, x2]` shape.
    pub(crate) fn apply_along(&self, values: &[T], shape: [usize; 4], pos: usize, transpose: bool) -> Vec<T> {
        let n = shape[pos];
        debug_assert_eq!(n, self.rows.len());
        let inner: usize = shape[pos + 1..].iter().product();
        let outer: usize = shape[..pos].iter().product();
        let mut out = vec![T::zero(); values.len()];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * n * inner + i;
                for (r, row) in self.rows.iter().enumerate() {
                    if transpose {
                        let v = values[base + r * inner];
                        for &(c, coef) in row {
                            let slot = &mut out[base + c * inner];
                            *slot = *slot + coef * v;
                        }
                    } else {
                        let acc = row
                            .iter()
                            .fold(T::zero(), |acc, &(c, coef)| acc + coef * values[base + c * inner]);
                        out[base + r * inner] = acc;
                    }
                }
            }
        }
        out
    }
}

/// Multiplies (or divides) an array by `weights` along position `pos`.
pub(crate) fn scale_along<T: Scalar>(values: &mut [T], shape: [usize; 4], pos: usize, weights: &[T], divide: bool) {
    let n = shape[pos];
    let inner: usize = shape[pos + 1..].iter().product();
    for (idx, v) in values.iter_mut().enumerate() {
        let w = weights[(idx / inner) % n];
        *v = if divide { *v / w } else { *v * w };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_annihilate_constants() {
        for b in [Boundary::Wall, Boundary::Periodic] {
            for s in [Stencil1d::<f64>::first_derivative(6, 0.1, b), Stencil1d::second_derivative(6, 0.1, b)] {
                for i in 0..s.len() {
                    let sum: f64 = s.row(i).iter().map(|&(_, c)| c).sum();
                    assert!(sum.abs() < 1e-12, "row {i} sums to {sum}");
                }
            }
        }
    }

    #[test]
    fn transpose_matches_dense_transpose() {
        let s = Stencil1d::<f64>::first_derivative(5, 0.5, Boundary::Wall);
        let x = [1.0, -2.0, 0.5, 3.0, 4.0];
        let y = [0.3, 0.1, -1.0, 2.0, 0.7];
        let sx = s.apply_along(&x, [1, 5, 1, 1], 1, false);
        let sty = s.apply_along(&y, [1, 5, 1, 1], 1, true);
        let lhs: f64 = sx.iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = sty.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn second_derivative_exact_on_cubics_at_walls() {
        let h = 0.25;
        let s = Stencil1d::<f64>::second_derivative(6, h, Boundary::Wall);
        let x: Vec<f64> = (0..6).map(|i| (i as f64 * h).powi(3)).collect();
        let d = s.apply_along(&x, [1, 6, 1, 1], 1, false);
        for (i, v) in d.iter().enumerate() {
            assert!((v - 6.0 * i as f64 * h).abs() < 1e-12);
        }
    }
}
