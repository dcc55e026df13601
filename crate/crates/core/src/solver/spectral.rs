//! Two-dimensional periodic FFT with the symbols of the finite-difference
//! operators, used to project onto discretely solenoidal fields and to
//! invert the Crank-Nicolson Helmholtz operator.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::field::Grid;
use crate::scalar::{count, lit, Scalar};

pub(crate) struct Spectral2d<T: Scalar> {
    n: [usize; 2],
    forward: [Arc<dyn Fft<T>>; 2],
    inverse: [Arc<dyn Fft<T>>; 2],
    /// Symbol of the central first difference along each axis, without `i`:
    /// `sin(k h) / h`.
    pub first: [Vec<T>; 2],
    /// Symbol of the negated compact second difference: `4 sin^2(k h / 2) / h^2`.
    pub second: [Vec<T>; 2],
}

impl<T: Scalar> Spectral2d<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        let mut planner = FftPlanner::<T>::new();
        let n = [grid.nodes(0), grid.nodes(1)];
        let symbols = |a: usize| {
            let h = grid.spacing(a);
            let len = n[a];
            let two_pi_over_l = T::TAU() / grid.extent(a);
            let k: Vec<T> = (0..len)
                .map(|m| {
                    let signed = if m <= len / 2 { count::<T>(m) } else { -count::<T>(len - m) };
                    signed * two_pi_over_l
                })
                .collect();
            let first = k.iter().map(|&k| (k * h).sin() / h).collect();
            let second = k
                .iter()
                .map(|&k| {
                    let s = (k * h * lit(0.5)).sin();
                    lit::<T>(4.0) * s * s / (h * h)
                })
                .collect();
            (first, second)
        };
        let (f0, s0) = symbols(0);
        let (f1, s1) = symbols(1);
        Self {
            n,
            forward: [planner.plan_fft_forward(n[0]), planner.plan_fft_forward(n[1])],
            inverse: [planner.plan_fft_inverse(n[0]), planner.plan_fft_inverse(n[1])],
            first: [f0, f1],
            second: [s0, s1],
        }
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    /// `(m0, m1)` mode indices of flat index `k`.
    pub fn mode(&self, k: usize) -> (usize, usize) {
        (k / self.n[1], k % self.n[1])
    }

    fn transform(&self, data: &mut [Complex<T>], plans: &[Arc<dyn Fft<T>>; 2]) {
        let [n0, n1] = self.n;
        for row in data.chunks_mut(n1) {
            plans[1].process(row);
        }
        let mut column = vec![Complex::new(T::zero(), T::zero()); n0];
        for j in 0..n1 {
            for i in 0..n0 {
                column[i] = data[i * n1 + j];
            }
            plans[0].process(&mut column);
            for i in 0..n0 {
                data[i * n1 + j] = column[i];
            }
        }
    }

    pub fn forward(&self, values: &[T]) -> Vec<Complex<T>> {
        let mut data: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    /// Inverse transform, normalized, real part.
    pub fn inverse(&self, mut data: Vec<Complex<T>>) -> Vec<T> {
        self.transform(&mut data, &self.inverse);
        let scale = T::one() / count(self.len());
        data.iter().map(|c| c.re * scale).collect()
    }

    /// Removes the discrete-gradient part of a velocity given in Fourier
    /// space, leaving `D . u = 0`. Modes on which every first difference
    /// vanishes are left untouched.
    pub fn project(&self, u: &mut [Vec<Complex<T>>; 2]) {
        for k in 0..self.len() {
            let (m0, m1) = self.mode(k);
            let s = [self.first[0][m0], self.first[1][m1]];
            let norm = s[0] * s[0] + s[1] * s[1];
            if norm == T::zero() {
                continue;
            }
            let div = u[0][k] * s[0] + u[1][k] * s[1];
            for a in 0..2 {
                u[a][k] = u[a][k] - div * (s[a] / norm);
            }
        }
    }

    /// Solves `D . D P = -D . f` for the mean-free potential `P`.
    pub fn pressure(&self, f: &[Vec<Complex<T>>; 2]) -> Vec<T> {
        let mut p = vec![Complex::new(T::zero(), T::zero()); self.len()];
        let i = Complex::new(T::zero(), T::one());
        for k in 0..self.len() {
            let (m0, m1) = self.mode(k);
            let s = [self.first[0][m0], self.first[1][m1]];
            let norm = s[0] * s[0] + s[1] * s[1];
            if norm == T::zero() {
                continue;
            }
            // -|s|^2 P = -i s . f
            p[k] = i * (f[0][k] * s[0] + f[1][k] * s[1]) / norm;
        }
        self.inverse(p)
    }

    /// Negated compact Laplacian symbol of flat mode `k`.
    pub fn laplacian_symbol(&self, k: usize) -> T {
        let (m0, m1) = self.mode(k);
        self.second[0][m0] + self.second[1][m1]
    }
}
