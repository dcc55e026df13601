//! Small dense direct solvers and least-squares assembly from sparse
//! Jacobian columns. Sized for desk-scale problems (a few thousand
//! unknowns).

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Row-major dense matrix.
#[derive(Clone, Debug)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let s = &mut self.data[i * self.cols + j];
        *s = *s + v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }
}

/// LU factorization with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(mut a: DenseMatrix<T>) -> Result<Self> {
        let n = a.rows;
        if n != a.cols {
            return Err(Error::Numerical("LU needs a square matrix".into()));
        }
        let scale = a.data.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tiny = scale * T::epsilon() * lit(n.max(1) as f64);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a.get(i, k).abs()))
                .fold((k, -T::one()), |best, c| if c.1 > best.1 { c } else { best });
            if !(pmax > tiny) {
                return Err(Error::Numerical(format!("singular matrix: pivot {k} vanishes")));
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a.get(k, k);
            let (head, tail) = a.data.split_at_mut((k + 1) * n);
            let row_k = &head[k * n..];
            for i in 0..(n - k - 1) {
                let row_i = &mut tail[i * n..(i + 1) * n];
                let l = row_i[k] / pivot;
                row_i[k] = l;
                if l != T::zero() {
                    for j in (k + 1)..n {
                        row_i[j] = row_i[j] - l * row_k[j];
                    }
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s = (0..i).fold(x[i], |acc, j| acc - row[j] * x[j]);
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = ((i + 1)..n).fold(x[i], |acc, j| acc - row[j] * x[j]);
            x[i] = s / row[i];
        }
        x
    }

    /// Ratio of the largest to the smallest pivot magnitude; a cheap
    /// conditioning indicator.
    pub fn pivot_ratio(&self) -> T {
        let n = self.lu.rows;
        let (mut lo, mut hi) = (T::infinity(), T::zero());
        for i in 0..n {
            let d = self.lu.get(i, i).abs();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        hi / lo
    }
}

/// Solves `a x = b` for symmetric positive definite `a` by Cholesky.
pub fn cholesky_solve<T: Scalar>(mut a: DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows;
    for j in 0..n {
        for i in j..n {
            let (ri, rj) = (i * n, j * n);
            let dot = (0..j).fold(T::zero(), |acc, k| acc + a.data[ri + k] * a.data[rj + k]);
            let s = a.data[ri + j] - dot;
            if i == j {
                if !(s > T::zero()) {
                    return Err(Error::Numerical(format!(
                        "normal matrix not positive definite at column {j}"
                    )));
                }
                a.data[ri + j] = s.sqrt();
            } else {
                a.data[ri + j] = s / a.data[rj + j];
            }
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        let s = (0..i).fold(y[i], |acc, k| acc - a.get(i, k) * y[k]);
        y[i] = s / a.get(i, i);
    }
    for i in (0..n).rev() {
        let s = ((i + 1)..n).fold(y[i], |acc, k| acc - a.get(k, i) * y[k]);
        y[i] = s / a.get(i, i);
    }
    Ok(y)
}

/// Jacobian stored column by column, nonzeros only.
#[derive(Clone, Debug)]
pub struct SparseColumns<T> {
    pub rows: usize,
    pub cols: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> SparseColumns<T> {
    /// Normal equations `(J^T J + shift I) x = -J^T r`.
    pub fn normal_equations(&self, residual: &[T], shift: T) -> (DenseMatrix<T>, Vec<T>) {
        let n = self.cols.len();
        let mut by_row: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                by_row[i].push((j, v));
            }
        }
        let mut a = DenseMatrix::zeros(n, n);
        let mut rhs = vec![T::zero(); n];
        for (i, row) in by_row.iter().enumerate() {
            for &(j, vj) in row {
                rhs[j] = rhs[j] - vj * residual[i];
                for &(k, vk) in row {
                    a.add(j, k, vj * vk);
                }
            }
        }
        for j in 0..n {
            a.add(j, j, shift);
        }
        (a, rhs)
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows];
        for (col, &xj) in self.cols.iter().zip(x) {
            for &(i, v) in col {
                out[i] = out[i] + v * xj;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DenseMatrix<f64> {
        let mut a = DenseMatrix::zeros(3, 3);
        let vals = [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                a.set(i, j, vals[i][j]);
            }
        }
        a
    }

    #[test]
    fn lu_solves_with_pivoting() {
        let a = sample();
        let x = [1.0, -2.0, 3.0];
        let b = a.mul_vec(&x);
        let sol = Lu::factor(a).unwrap().solve(&b);
        for (s, e) in sol.iter().zip(&x) {
            assert!((s - e).abs() < 1e-14);
        }
    }

    #[test]
    fn lu_reports_singularity() {
        let mut a = DenseMatrix::<f64>::zeros(2, 2);
        a.set(0, 0, 1.0);
        a.set(0, 1, 2.0);
        a.set(1, 0, 2.0);
        a.set(1, 1, 4.0);
        assert!(matches!(Lu::factor(a), Err(Error::Numerical(_))));
    }

    #[test]
    fn least_squares_via_normal_equations() {
        // overdetermined consistent system
        let j = SparseColumns {
            rows: 3,
            cols: vec![vec![(0, 1.0), (2, 1.0)], vec![(1, 2.0), (2, 1.0)]],
        };
        let x_true = [0.5, -1.5];
        let r: Vec<f64> = j.mul_vec(&x_true).iter().map(|v| -v).collect();
        let (a, rhs) = j.normal_equations(&r, 0.0);
        let x = cholesky_solve(a, &rhs).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-14 && (x[1] + 1.5).abs() < 1e-14);
    }
}
