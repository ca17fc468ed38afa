use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem::Dof1;
use crate::scalar::Real;
use crate::symbols::Discretization;

/// Where an unknown sits inside its cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GridType {
    Node,
    XEdge,
    YEdge,
    Cell,
}

impl GridType {
    pub const ALL: [GridType; 4] = [GridType::Node, GridType::XEdge, GridType::YEdge, GridType::Cell];

    /// Offset from the cell's lower-left vertex in half mesh widths.
    #[inline]
    pub fn half(self) -> (i32, i32) {
        match self {
            GridType::Node => (0, 0),
            GridType::XEdge => (1, 0),
            GridType::YEdge => (0, 1),
            GridType::Cell => (1, 1),
        }
    }

    pub fn dofs(self) -> (Dof1, Dof1) {
        match self {
            GridType::Node => (Dof1::Vertex, Dof1::Vertex),
            GridType::XEdge => (Dof1::Mid, Dof1::Vertex),
            GridType::YEdge => (Dof1::Vertex, Dof1::Mid),
            GridType::Cell => (Dof1::Mid, Dof1::Mid),
        }
    }

    pub fn from_dofs(x: Dof1, y: Dof1) -> GridType {
        match (x, y) {
            (Dof1::Vertex, Dof1::Vertex) => GridType::Node,
            (Dof1::Mid, Dof1::Vertex) => GridType::XEdge,
            (Dof1::Vertex, Dof1::Mid) => GridType::YEdge,
            (Dof1::Mid, Dof1::Mid) => GridType::Cell,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    U,
    V,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockInfo {
    pub name: &'static str,
    pub component: Component,
    pub ty: GridType,
}

const fn bi(name: &'static str, component: Component, ty: GridType) -> BlockInfo {
    BlockInfo { name, component, ty }
}

const EQUAL_ORDER: [BlockInfo; 3] =
    [bi("u", Component::U, GridType::Node), bi("v", Component::V, GridType::Node), bi("p", Component::P, GridType::Node)];

const TAYLOR_HOOD: [BlockInfo; 9] = [
    bi("u_node", Component::U, GridType::Node),
    bi("u_xedge", Component::U, GridType::XEdge),
    bi("u_yedge", Component::U, GridType::YEdge),
    bi("u_cell", Component::U, GridType::Cell),
    bi("v_node", Component::V, GridType::Node),
    bi("v_xedge", Component::V, GridType::XEdge),
    bi("v_yedge", Component::V, GridType::YEdge),
    bi("v_cell", Component::V, GridType::Cell),
    bi("p", Component::P, GridType::Node),
];

const SCALAR: [BlockInfo; 1] = [bi("p", Component::P, GridType::Node)];

/// Block structure of a grid function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldLayout {
    /// `u, v, p` on the nodes.
    EqualOrder,
    /// Four sub-grids per velocity component plus nodal pressure.
    TaylorHood,
    /// A single nodal grid (pressure-type operators).
    Scalar,
}

impl FieldLayout {
    pub fn for_kind(kind: Discretization) -> Self {
        match kind {
            Discretization::Q2Q1 => FieldLayout::TaylorHood,
            _ => FieldLayout::EqualOrder,
        }
    }

    pub fn blocks(self) -> &'static [BlockInfo] {
        match self {
            FieldLayout::EqualOrder => &EQUAL_ORDER,
            FieldLayout::TaylorHood => &TAYLOR_HOOD,
            FieldLayout::Scalar => &SCALAR,
        }
    }

    pub fn len(self) -> usize {
        self.blocks().len()
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Index of the pressure block.
    pub fn pressure(self) -> usize {
        self.len() - 1
    }

    /// Number of sub-grids per velocity component.
    pub fn velocity_types(self) -> usize {
        match self {
            FieldLayout::EqualOrder => 1,
            FieldLayout::TaylorHood => 4,
            FieldLayout::Scalar => 0,
        }
    }

    pub fn block_index(self, name: &str) -> Option<usize> {
        self.blocks().iter().position(|b| b.name == name)
    }
}

/// A periodic grid function: one `n × n` sub-grid per block, stored row-major
/// (`index = j·n + i` with `i` along x).
#[derive(Clone, PartialEq)]
pub struct BlockGridFunction<T> {
    n: usize,
    layout: FieldLayout,
    data: Vec<Vec<T>>,
}

impl<T: Real> BlockGridFunction<T> {
    pub fn zeros(layout: FieldLayout, n: usize) -> Self {
        BlockGridFunction { n, layout, data: vec![vec![T::zero(); n * n]; layout.len()] }
    }

    pub fn from_blocks(layout: FieldLayout, n: usize, data: Vec<Vec<T>>) -> Result<Self> {
        if data.len() != layout.len() {
            return Err(Error::Parse(format!("expected {} blocks, got {}", layout.len(), data.len())));
        }
        for b in &data {
            if b.len() != n * n {
                return Err(Error::SizeMismatch { expected: n, got: (b.len() as f64).sqrt() as usize });
            }
        }
        Ok(BlockGridFunction { n, layout, data })
    }

    /// Values `k / 2³²` drawn uniformly from `[0, 1)` with a ChaCha8 stream.
    /// The dyadic values keep block sums exact, so subtracting means is exact.
    pub fn random(layout: FieldLayout, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = T::lit(1.0 / 4_294_967_296.0);
        let mut f = Self::zeros(layout, n);
        for b in f.data.iter_mut() {
            for v in b.iter_mut() {
                *v = T::from_u32(rng.gen::<u32>()).expect("u32 representable") * scale;
            }
        }
        f
    }

    pub fn from_fn(layout: FieldLayout, n: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut g = Self::zeros(layout, n);
        for (b, block) in g.data.iter_mut().enumerate() {
            for j in 0..n {
                for i in 0..n {
                    block[j * n + i] = f(b, i, j);
                }
            }
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn layout(&self) -> FieldLayout {
        self.layout
    }

    #[inline]
    pub fn block(&self, b: usize) -> &[T] {
        &self.data[b]
    }

    #[inline]
    pub fn block_mut(&mut self, b: usize) -> &mut [T] {
        &mut self.data[b]
    }

    pub fn blocks(&self) -> &[Vec<T>] {
        &self.data
    }

    pub fn into_blocks(self) -> Vec<Vec<T>> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len() * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { expected: self.n, got: other.n });
        }
        if self.layout != other.layout {
            return Err(Error::Parse(format!("layout mismatch: {:?} vs {:?}", self.layout, other.layout)));
        }
        Ok(())
    }

    pub fn dot(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>()).sum()
    }

    pub fn norm2(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn fill(&mut self, v: T) {
        for b in self.data.iter_mut() {
            b.iter_mut().for_each(|x| *x = v);
        }
    }

    /// `self += a·x`.
    pub fn axpy(&mut self, a: T, x: &Self) {
        for (yb, xb) in self.data.iter_mut().zip(&x.data) {
            for (y, &v) in yb.iter_mut().zip(xb) {
                *y = *y + a * v;
            }
        }
    }

    pub fn scale(&mut self, a: T) {
        for b in self.data.iter_mut() {
            b.iter_mut().for_each(|x| *x = *x * a);
        }
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        out
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().flatten().all(|v| v.is_finite())
    }

    /// Mean of every component (`u`, `v`, `p`) over all its sub-grids.
    pub fn component_means(&self) -> Vec<(Component, T)> {
        let mut out: Vec<(Component, T, usize)> = Vec::new();
        for (b, info) in self.layout.blocks().iter().enumerate() {
            let s: T = self.data[b].iter().copied().sum();
            match out.iter_mut().find(|(c, _, _)| *c == info.component) {
                Some(e) => {
                    e.1 = e.1 + s;
                    e.2 += self.n * self.n;
                }
                None => out.push((info.component, s, self.n * self.n)),
            }
        }
        out.into_iter().map(|(c, s, k)| (c, s / T::from_usize_lossy(k))).collect()
    }

    /// Subtracts from every component its mean, projecting out the constant
    /// modes that form the nullspace of the periodic problem.
    pub fn remove_means(&mut self) {
        let means = self.component_means();
        for (b, info) in self.layout.blocks().iter().enumerate() {
            let m = means.iter().find(|(c, _)| *c == info.component).map(|(_, m)| *m).unwrap_or(T::zero());
            self.data[b].iter_mut().for_each(|x| *x = *x - m);
        }
    }

    /// Cyclic shift: `out(i, j) = self(i - k1, j - k2)`.
    pub fn shifted(&self, k1: usize, k2: usize) -> Self {
        let n = self.n;
        let mut out = Self::zeros(self.layout, n);
        for (ob, ib) in out.data.iter_mut().zip(&self.data) {
            for j in 0..n {
                for i in 0..n {
                    ob[((j + k2) % n) * n + (i + k1) % n] = ib[j * n + i];
                }
            }
        }
        out
    }
}

impl<T: Real> fmt::Debug for BlockGridFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockGridFunction")
            .field("n", &self.n)
            .field("layout", &self.layout)
            .field("norm", &self.norm2())
            .finish()
    }
}

/// `n` must be a power of two, at least 2.
pub fn check_grid_size(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::BadGridSize(n));
    }
    Ok(())
}
