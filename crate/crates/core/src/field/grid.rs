use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{count, lit, Scalar};

/// Boundary treatment of one spatial axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Wraparound; the node at `extent` is identified with the node at 0.
    Periodic,
    /// Solid boundary; both end nodes lie on the boundary.
    Wall,
}

/// Which end of an axis a boundary face sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    /// Sign of the outward normal component along the face axis.
    pub fn normal_sign<T: Scalar>(self) -> T {
        match self {
            Side::Lower => -T::one(),
            Side::Upper => T::one(),
        }
    }
}

/// One face of a box domain: all nodes with the axis index at its first or
/// last value, with the trapezoid weights of the remaining axes.
#[derive(Clone, Debug)]
pub struct Face<T> {
    pub axis: usize,
    pub side: Side,
    /// Flat spatial indices of the nodes on this face.
    pub nodes: Vec<usize>,
    /// Surface quadrature weight of each node.
    pub weights: Vec<T>,
}

impl<T: Scalar> Face<T> {
    pub fn label(&self) -> String {
        let side = match self.side {
            Side::Lower => "lo",
            Side::Upper => "hi",
        };
        format!("axis{}_{}", self.axis, side)
    }

    /// Outward unit normal, `dim` components.
    pub fn normal(&self, dim: usize) -> Vec<T> {
        let mut n = vec![T::zero(); dim];
        n[self.axis] = self.side.normal_sign();
        n
    }
}

/// Structured space-time grid on the box `[0, extent_0] x ... x [0, tau]`.
///
/// Values are stored time-major, then axis 0, then axis 1, and so on.
/// `time_nodes == 1` encodes a steady problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    extent: Vec<T>,
    nodes: Vec<usize>,
    boundary: Vec<Boundary>,
    time_nodes: usize,
    dt: T,
}

impl<T: Scalar> Grid<T> {
    pub fn new(
        extent: Vec<T>,
        nodes: Vec<usize>,
        boundary: Vec<Boundary>,
        time_nodes: usize,
        dt: T,
    ) -> Result<Self> {
        let dim = extent.len();
        if !(1..=3).contains(&dim) {
            return Err(domain(format!("spatial dimension must be 1, 2 or 3, got {dim}")));
        }
        if nodes.len() != dim || boundary.len() != dim {
            return Err(domain("extent, nodes and boundary must have one entry per axis"));
        }
        if let Some(a) = nodes.iter().position(|&n| n < 3) {
            return Err(domain(format!("axis {a} has {} nodes; at least 3 are required", nodes[a])));
        }
        if let Some(a) = extent.iter().position(|&e| !(e > T::zero()) || !e.is_finite()) {
            return Err(domain(format!("axis {a} extent must be positive and finite")));
        }
        if time_nodes == 0 || time_nodes == 2 {
            return Err(domain(format!(
                "time_nodes must be 1 (steady) or at least 3, got {time_nodes}"
            )));
        }
        if time_nodes > 1 && (!(dt > T::zero()) || !dt.is_finite()) {
            return Err(domain("dt must be positive for a time-dependent grid"));
        }
        let dt = if time_nodes == 1 { T::zero() } else { dt };
        Ok(Self { extent, nodes, boundary, time_nodes, dt })
    }

    /// Time-independent grid (`time_nodes == 1`).
    pub fn steady(extent: Vec<T>, nodes: Vec<usize>, boundary: Vec<Boundary>) -> Result<Self> {
        Self::new(extent, nodes, boundary, 1, T::zero())
    }

    /// Same spatial layout with a different time axis.
    pub fn with_time(&self, time_nodes: usize, dt: T) -> Result<Self> {
        Self::new(self.extent.clone(), self.nodes.clone(), self.boundary.clone(), time_nodes, dt)
    }

    /// The spatial part of this grid as a steady grid.
    pub fn spatial(&self) -> Self {
        Self { time_nodes: 1, dt: T::zero(), ..self.clone() }
    }

    /// The 2D periodic box `[0, 2pi)^2` with `n` nodes per axis.
    pub fn periodic_square(n: usize, time_nodes: usize, dt: T) -> Result<Self> {
        let two_pi = T::PI() + T::PI();
        Self::new(
            vec![two_pi, two_pi],
            vec![n, n],
            vec![Boundary::Periodic, Boundary::Periodic],
            time_nodes,
            dt,
        )
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn extent(&self, axis: usize) -> T {
        self.extent[axis]
    }

    pub fn extents(&self) -> &[T] {
        &self.extent
    }

    pub fn nodes(&self, axis: usize) -> usize {
        self.nodes[axis]
    }

    pub fn node_counts(&self) -> &[usize] {
        &self.nodes
    }

    pub fn boundary(&self, axis: usize) -> Boundary {
        self.boundary[axis]
    }

    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundary
    }

    pub fn spacing(&self, axis: usize) -> T {
        let n = self.nodes[axis];
        match self.boundary[axis] {
            Boundary::Periodic => self.extent[axis] / count(n),
            Boundary::Wall => self.extent[axis] / count(n - 1),
        }
    }

    pub fn time_nodes(&self) -> usize {
        self.time_nodes
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Time horizon `(time_nodes - 1) * dt`.
    pub fn tau(&self) -> T {
        self.dt * count(self.time_nodes - 1)
    }

    pub fn is_steady(&self) -> bool {
        self.time_nodes == 1
    }

    pub fn has_wall(&self) -> bool {
        self.boundary.contains(&Boundary::Wall)
    }

    pub fn all_periodic(&self) -> bool {
        self.boundary.iter().all(|&b| b == Boundary::Periodic)
    }

    /// Coordinate of node `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> T {
        self.spacing(axis) * count(i)
    }

    pub fn time(&self, n: usize) -> T {
        self.dt * count(n)
    }

    /// Number of spatial nodes.
    pub fn space_len(&self) -> usize {
        self.nodes.iter().product()
    }

    /// Number of space-time nodes.
    pub fn len(&self) -> usize {
        self.space_len() * self.time_nodes
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `[time, axis0, axis1, axis2]` with missing axes padded by 1.
    pub(crate) fn shape(&self) -> [usize; 4] {
        let mut s = [self.time_nodes, 1, 1, 1];
        for (a, &n) in self.nodes.iter().enumerate() {
            s[a + 1] = n;
        }
        s
    }

    /// Flat spatial index of a multi-index.
    pub fn space_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.nodes).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Multi-index (padded to three axes) of a flat spatial index.
    pub fn space_multi(&self, mut k: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for a in (0..self.dim()).rev() {
            out[a] = k % self.nodes[a];
            k /= self.nodes[a];
        }
        out
    }

    /// Physical position of a spatial node.
    pub fn position(&self, k: usize) -> Vec<T> {
        let m = self.space_multi(k);
        (0..self.dim()).map(|a| self.coord(a, m[a])).collect()
    }

    /// True when node `k` lies on a Wall face.
    pub fn is_boundary_node(&self, k: usize) -> bool {
        let m = self.space_multi(k);
        (0..self.dim()).any(|a| {
            self.boundary[a] == Boundary::Wall && (m[a] == 0 || m[a] == self.nodes[a] - 1)
        })
    }

    /// One-dimensional quadrature weights along `axis`: trapezoid on Wall
    /// axes, rectangle rule on Periodic axes.
    pub fn axis_weights(&self, axis: usize) -> Vec<T> {
        let n = self.nodes[axis];
        let h = self.spacing(axis);
        let mut w = vec![h; n];
        if self.boundary[axis] == Boundary::Wall {
            w[0] = h * lit(0.5);
            w[n - 1] = h * lit(0.5);
        }
        w
    }

    /// Trapezoid weights in time; a single unit weight for steady grids.
    pub fn time_weights(&self) -> Vec<T> {
        if self.is_steady() {
            return vec![T::one()];
        }
        let mut w = vec![self.dt; self.time_nodes];
        w[0] = self.dt * lit(0.5);
        w[self.time_nodes - 1] = self.dt * lit(0.5);
        w
    }

    /// Tensor-product spatial quadrature weights per flat spatial index.
    pub fn space_weights(&self) -> Vec<T> {
        let per_axis: Vec<Vec<T>> = (0..self.dim()).map(|a| self.axis_weights(a)).collect();
        (0..self.space_len())
            .map(|k| {
                let m = self.space_multi(k);
                per_axis.iter().enumerate().fold(T::one(), |acc, (a, w)| acc * w[m[a]])
            })
            .collect()
    }

    /// All faces of Wall axes, lower face first.
    pub fn boundary_faces(&self) -> Vec<Face<T>> {
        let per_axis: Vec<Vec<T>> = (0..self.dim()).map(|a| self.axis_weights(a)).collect();
        let mut faces = Vec::new();
        for axis in 0..self.dim() {
            if self.boundary[axis] != Boundary::Wall {
                continue;
            }
            for (side, fixed) in [(Side::Lower, 0), (Side::Upper, self.nodes[axis] - 1)] {
                let mut nodes = Vec::new();
                let mut weights = Vec::new();
                for k in 0..self.space_len() {
                    let m = self.space_multi(k);
                    if m[axis] != fixed {
                        continue;
                    }
                    let w = (0..self.dim())
                        .filter(|&b| b != axis)
                        .fold(T::one(), |acc, b| acc * per_axis[b][m[b]]);
                    nodes.push(k);
                    weights.push(w);
                }
                faces.push(Face { axis, side, nodes, weights });
            }
        }
        faces
    }

    /// Half the box diagonal: radius of the smallest sphere enclosing the box.
    pub fn enclosing_radius(&self) -> T {
        let sq = self.extent.iter().fold(T::zero(), |acc, &e| acc + e * e);
        sq.sqrt() * lit(0.5)
    }
}
