use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::field::Grid;
use crate::scalar::Scalar;

/// Real values on every space-time node of a grid.
#[derive(Clone, Debug)]
pub struct ScalarField<T> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn new(grid: Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(domain(format!(
                "field has {} values but the grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn constant(grid: &Arc<Grid<T>>, c: T) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    /// Samples `f(x, t)` at every node.
    pub fn from_fn(grid: &Arc<Grid<T>>, f: impl Fn(&[T], T) -> T) -> Self {
        let s = grid.space_len();
        let positions: Vec<Vec<T>> = (0..s).map(|k| grid.position(k)).collect();
        let mut values = Vec::with_capacity(grid.len());
        for n in 0..grid.time_nodes() {
            let t = grid.time(n);
            values.extend(positions.iter().map(|x| f(x, t)));
        }
        Self { grid: grid.clone(), values }
    }

    pub(crate) fn from_parts(grid: Arc<Grid<T>>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Value at time level `n`, flat spatial node `k`.
    pub fn at(&self, n: usize, k: usize) -> T {
        self.values[n * self.grid.space_len() + k]
    }

    pub fn set(&mut self, n: usize, k: usize, v: T) {
        let s = self.grid.space_len();
        self.values[n * s + k] = v;
    }

    /// Values of one time level.
    pub fn slice(&self, n: usize) -> &[T] {
        let s = self.grid.space_len();
        &self.values[n * s..(n + 1) * s]
    }

    pub fn slice_mut(&mut self, n: usize) -> &mut [T] {
        let s = self.grid.space_len();
        &mut self.values[n * s..(n + 1) * s]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        debug_assert_eq!(self.values.len(), other.values.len());
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Node-wise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: T, other: &Self) {
        for (s, &o) in self.values.iter_mut().zip(&other.values) {
            *s = *s + a * o;
        }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Root-mean-square over all nodes.
    pub fn rms(&self) -> T {
        if self.values.is_empty() {
            return T::zero();
        }
        let ss = self.values.iter().fold(T::zero(), |acc, &v| acc + v * v);
        (ss / crate::scalar::count(self.values.len())).sqrt()
    }

    /// Whether the two fields live on equal grids.
    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }
}

impl<T: Scalar> Add for &ScalarField<T> {
    type Output = ScalarField<T>;
    fn add(self, rhs: Self) -> ScalarField<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &ScalarField<T> {
    type Output = ScalarField<T>;
    fn sub(self, rhs: Self) -> ScalarField<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Mul<T> for &ScalarField<T> {
    type Output = ScalarField<T>;
    fn mul(self, rhs: T) -> ScalarField<T> {
        self.map(|a| a * rhs)
    }
}

impl<T: Scalar> Neg for &ScalarField<T> {
    type Output = ScalarField<T>;
    fn neg(self) -> ScalarField<T> {
        self.map(|a| -a)
    }
}

/// `dim` scalar components on a shared grid.
#[derive(Clone, Debug)]
pub struct VectorField<T> {
    comps: Vec<ScalarField<T>>,
}

impl<T: Scalar> VectorField<T> {
    pub fn new(comps: Vec<ScalarField<T>>) -> Result<Self> {
        let first = comps.first().ok_or_else(|| domain("vector field needs components"))?;
        let dim = first.grid().dim();
        if comps.len() != dim {
            return Err(domain(format!(
                "vector field has {} components on a {dim}-dimensional grid",
                comps.len()
            )));
        }
        if comps.iter().any(|c| !c.same_grid(first)) {
            return Err(domain("vector components live on different grids"));
        }
        Ok(Self { comps })
    }

    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self { comps: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect() }
    }

    /// Samples component `i` as `f(x, t, i)`.
    pub fn from_fn(grid: &Arc<Grid<T>>, f: impl Fn(&[T], T, usize) -> T) -> Self {
        Self {
            comps: (0..grid.dim())
                .map(|i| ScalarField::from_fn(grid, |x, t| f(x, t, i)))
                .collect(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        self.comps[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, i: usize) -> &ScalarField<T> {
        &self.comps[i]
    }

    pub fn comp_mut(&mut self, i: usize) -> &mut ScalarField<T> {
        &mut self.comps[i]
    }

    pub fn comps(&self) -> &[ScalarField<T>] {
        &self.comps
    }

    pub fn into_comps(self) -> Vec<ScalarField<T>> {
        self.comps
    }

    pub fn map(&self, f: impl Fn(&ScalarField<T>) -> ScalarField<T>) -> Self {
        Self { comps: self.comps.iter().map(f).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Self {
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.zip_with(b, &f)).collect(),
        }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|f| f * c)
    }

    pub fn max_abs(&self) -> T {
        self.comps.iter().fold(T::zero(), |m, c| m.max(c.max_abs()))
    }

    /// Sum over components of the squared values, node-wise.
    pub fn norm_squared(&self) -> ScalarField<T> {
        let mut acc = ScalarField::zeros(self.grid());
        for c in &self.comps {
            for (a, &v) in acc.values_mut().iter_mut().zip(c.values()) {
                *a = *a + v * v;
            }
        }
        acc
    }

    /// Euclidean norm of all node values stacked.
    pub fn l2_norm(&self) -> T {
        self.comps
            .iter()
            .flat_map(|c| c.values().iter())
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.comps[0].same_grid(&other.comps[0])
    }
}

impl<T: Scalar> Add for &VectorField<T> {
    type Output = VectorField<T>;
    fn add(self, rhs: Self) -> VectorField<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &VectorField<T> {
    type Output = VectorField<T>;
    fn sub(self, rhs: Self) -> VectorField<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// The four unknowns of the dual functional: velocity `u`, pressure `p`,
/// and their dual partners `w`, `r`.
#[derive(Clone, Debug)]
pub struct FieldQuartet<T> {
    pub u: VectorField<T>,
    pub p: ScalarField<T>,
    pub w: VectorField<T>,
    pub r: ScalarField<T>,
}

impl<T: Scalar> FieldQuartet<T> {
    pub fn new(
        u: VectorField<T>,
        p: ScalarField<T>,
        w: VectorField<T>,
        r: ScalarField<T>,
    ) -> Result<Self> {
        let q = Self { u, p, w, r };
        q.check_grids()?;
        Ok(q)
    }

    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self {
            u: VectorField::zeros(grid),
            p: ScalarField::zeros(grid),
            w: VectorField::zeros(grid),
            r: ScalarField::zeros(grid),
        }
    }

    /// Quartet with `w = u` and `r = p`.
    pub fn symmetric(u: VectorField<T>, p: ScalarField<T>) -> Result<Self> {
        Self::new(u.clone(), p.clone(), u, p)
    }

    pub fn check_grids(&self) -> Result<()> {
        let g = self.u.comp(0);
        let ok = self.u.comps().iter().all(|c| c.same_grid(g))
            && self.w.comps().iter().all(|c| c.same_grid(g))
            && self.p.same_grid(g)
            && self.r.same_grid(g)
            && self.u.dim() == self.w.dim();
        if ok {
            Ok(())
        } else {
            Err(domain("quartet fields do not share one grid"))
        }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        self.p.grid()
    }

    /// The interchanged quartet `(w, r, u, p)`.
    pub fn swapped(&self) -> Self {
        Self { u: self.w.clone(), p: self.r.clone(), w: self.u.clone(), r: self.p.clone() }
    }

    pub fn scale(&self, c: T) -> Self {
        Self { u: self.u.scale(c), p: &self.p * c, w: self.w.scale(c), r: &self.r * c }
    }

    /// `self + c * other`, field by field.
    pub fn add_scaled(&self, c: T, other: &Self) -> Self {
        let f = |a: T, b: T| a + c * b;
        Self {
            u: self.u.zip_with(&other.u, f),
            p: self.p.zip_with(&other.p, f),
            w: self.w.zip_with(&other.w, f),
            r: self.r.zip_with(&other.r, f),
        }
    }

    /// Largest nodal magnitude across all four fields.
    pub fn max_abs(&self) -> T {
        self.u.max_abs().max(self.w.max_abs()).max(self.p.max_abs()).max(self.r.max_abs())
    }
}
