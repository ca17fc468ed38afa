use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fem::Entry1;
use crate::gridops::grid::GridType;
use crate::scalar::{cis, Real};
use crate::symbols::Frequency;

/// Constant-coefficient coupling from a `col`-type sub-grid into a `row`-type
/// sub-grid. Each entry `(κx, κy, w)` says the output at position `z` receives
/// `w` times the input at `z + κ·h/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil<T> {
    pub row: GridType,
    pub col: GridType,
    pub entries: Vec<(i32, i32, T)>,
}

impl<T: Real> Stencil<T> {
    pub fn new(row: GridType, col: GridType, entries: Vec<(i32, i32, T)>) -> Result<Self> {
        let (rx, ry) = row.half();
        let (cx, cy) = col.half();
        for &(kx, ky, _) in &entries {
            if (kx - cx + rx).rem_euclid(2) != 0 || (ky - cy + ry).rem_euclid(2) != 0 {
                return Err(Error::InvalidParameter(format!(
                    "offset ({kx}, {ky}) does not connect {row:?} to {col:?}"
                )));
            }
        }
        Ok(Stencil { row, col, entries }.simplified())
    }

    pub fn zero(row: GridType, col: GridType) -> Self {
        Stencil { row, col, entries: Vec::new() }
    }

    pub fn identity(ty: GridType) -> Self {
        Stencil { row: ty, col: ty, entries: vec![(0, 0, T::one())] }
    }

    /// Builds a nodal stencil from a printed square array whose first row is
    /// the top (`+y`) row.
    pub fn from_printed(rows: &[&[f64]]) -> Result<Self> {
        let k = rows.len();
        if k % 2 == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::Parse("printed stencil must be square with odd size".into()));
        }
        let r = (k / 2) as i32;
        let mut entries = Vec::new();
        for (a, row) in rows.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    entries.push((2 * (b as i32 - r), 2 * (r - a as i32), T::lit(v)));
                }
            }
        }
        Stencil::new(GridType::Node, GridType::Node, entries)
    }

    /// Tensor product of two 1D stencils, restricted to the row/col unknown
    /// types of this grid pair.
    pub fn tensor(row: GridType, col: GridType, x: &[Entry1<T>], y: &[Entry1<T>]) -> Self {
        let (rx, ry) = row.dofs();
        let (cx, cy) = col.dofs();
        let mut entries = Vec::new();
        for ex in x.iter().filter(|e| e.row == rx && e.col == cx) {
            for ey in y.iter().filter(|e| e.row == ry && e.col == cy) {
                entries.push((ex.offset, ey.offset, ex.value * ey.value));
            }
        }
        Stencil { row, col, entries }.simplified()
    }

    /// Merges duplicate offsets and drops exact zeros; entries end up sorted.
    pub fn simplified(self) -> Self {
        let mut map: BTreeMap<(i32, i32), T> = BTreeMap::new();
        for (kx, ky, w) in self.entries {
            let e = map.entry((ky, kx)).or_insert(T::zero());
            *e = *e + w;
        }
        let entries = map.into_iter().filter(|(_, w)| *w != T::zero()).map(|((ky, kx), w)| (kx, ky, w)).collect();
        Stencil { row: self.row, col: self.col, entries }
    }

    /// Drops entries below `tol` in magnitude.
    pub fn pruned(mut self, tol: T) -> Self {
        self.entries.retain(|e| e.2.abs() > tol);
        self
    }

    pub fn scaled(&self, s: T) -> Self {
        Stencil { row: self.row, col: self.col, entries: self.entries.iter().map(|&(a, b, w)| (a, b, w * s)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_types(other)?;
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Stencil { row: self.row, col: self.col, entries }.simplified())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-T::one()))
    }

    fn check_same_types(&self, other: &Self) -> Result<()> {
        if self.row != other.row || self.col != other.col {
            return Err(Error::InvalidParameter(format!(
                "stencil types differ: {:?}←{:?} vs {:?}←{:?}",
                self.row, self.col, other.row, other.col
            )));
        }
        Ok(())
    }

    /// Adjoint coupling `col ← row`.
    pub fn transpose(&self) -> Self {
        Stencil {
            row: self.col,
            col: self.row,
            entries: self.entries.iter().map(|&(a, b, w)| (-a, -b, w)).collect(),
        }
        .simplified()
    }

    /// `self ∘ other`: first `other` (`mid ← col`), then `self` (`row ← mid`).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.col != other.row {
            return Err(Error::InvalidParameter(format!(
                "cannot compose {:?}←{:?} with {:?}←{:?}",
                self.row, self.col, other.row, other.col
            )));
        }
        let mut entries = Vec::with_capacity(self.entries.len() * other.entries.len());
        for &(a1, b1, w1) in &self.entries {
            for &(a2, b2, w2) in &other.entries {
                entries.push((a1 + a2, b1 + b2, w1 * w2));
            }
        }
        Ok(Stencil { row: self.row, col: other.col, entries }.simplified())
    }

    /// Coefficient at offset zero.
    pub fn center(&self) -> T {
        self.entries.iter().find(|e| e.0 == 0 && e.1 == 0).map(|e| e.2).unwrap_or(T::zero())
    }

    pub fn row_sum(&self) -> T {
        self.entries.iter().map(|e| e.2).sum()
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, e| m.max(e.2.abs()))
    }

    /// Fourier symbol `Σ w·exp(i(θ1κx + θ2κy)/2)`.
    pub fn symbol(&self, theta: &Frequency<T>) -> Complex<T> {
        let half = T::lit(0.5);
        self.entries.iter().fold(Complex::<T>::zero(), |acc, &(kx, ky, w)| {
            let phase = half * (theta.theta1 * T::lit(kx as f64) + theta.theta2 * T::lit(ky as f64));
            acc + cis(phase) * w
        })
    }

    /// Entries as whole-cell shifts `(di, dj, w)`: input cell `(i+di, j+dj)`
    /// feeds output cell `(i, j)`.
    pub fn cell_offsets(&self) -> Vec<(i32, i32, T)> {
        let (rx, ry) = self.row.half();
        let (cx, cy) = self.col.half();
        self.entries.iter().map(|&(kx, ky, w)| ((kx + rx - cx) / 2, (ky + ry - cy) / 2, w)).collect()
    }

    /// Largest whole-cell reach in either direction.
    pub fn reach(&self) -> i32 {
        self.cell_offsets().iter().map(|&(a, b, _)| a.abs().max(b.abs())).max().unwrap_or(0)
    }

    /// Nodal stencil as a printed array, top row first.
    pub fn printed(&self) -> Vec<Vec<T>> {
        let r = self.entries.iter().map(|e| (e.0.abs().max(e.1.abs()) + 1) / 2).max().unwrap_or(0);
        let k = (2 * r + 1) as usize;
        let mut out = vec![vec![T::zero(); k]; k];
        for &(kx, ky, w) in &self.entries {
            let (cx, cy) = ((kx + 2 * r) / 2, (2 * r - ky) / 2);
            out[cy as usize][cx as usize] = w;
        }
        out
    }
}

/// `y += w · shift(x, di, dj)` on a periodic `n × n` grid, i.e.
/// `y(i, j) += w · x(i + di, j + dj)`.
pub(crate) fn accumulate_shifted<T: Real>(y: &mut [T], x: &[T], n: usize, di: i32, dj: i32, w: T) {
    let ni = n as i32;
    let si = di.rem_euclid(ni) as usize;
    let sj = dj.rem_euclid(ni) as usize;
    let split = n - si;
    for j in 0..n {
        let src = ((j + sj) % n) * n;
        let dst = j * n;
        let yr = &mut y[dst..dst + n];
        let xr = &x[src..src + n];
        for (yv, &xv) in yr[..split].iter_mut().zip(&xr[si..]) {
            *yv = *yv + w * xv;
        }
        for (yv, &xv) in yr[split..].iter_mut().zip(&xr[..si]) {
            *yv = *yv + w * xv;
        }
    }
}

/// Applies `s` to one sub-grid, accumulating into `y`.
pub fn apply_stencil<T: Real>(s: &Stencil<T>, x: &[T], y: &mut [T], n: usize) {
    for (di, dj, w) in s.cell_offsets() {
        accumulate_shifted(y, x, n, di, dj, w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem;

    #[test]
    fn q1_laplacian_prints_as_expected() {
        let h: f64 = 0.5;
        let a = Stencil::tensor(GridType::Node, GridType::Node, &fem::q1_stiffness(h), &fem::q1_mass(h))
            .add(&Stencil::tensor(GridType::Node, GridType::Node, &fem::q1_mass(h), &fem::q1_stiffness(h)))
            .unwrap();
        let p = a.printed();
        let t = 1.0 / 3.0;
        let expect = [[-t, -t, -t], [-t, 8.0 * t, -t], [-t, -t, -t]];
        for r in 0..3 {
            for c in 0..3 {
                assert!((p[r][c] - expect[r][c]).abs() < 1e-14);
            }
        }
        assert!(a.row_sum().abs() < 1e-14);
    }

    #[test]
    fn transpose_conjugates_symbol() {
        let s = Stencil::tensor(GridType::XEdge, GridType::Node, &fem::q2q1_derivative(), &fem::q2q1_mass(0.1));
        let th = Frequency::raw(0.3, -1.1);
        let a = s.symbol(&th);
        let b = s.transpose().symbol(&th);
        assert!((a.conj() - b).norm() < 1e-15);
    }

    #[test]
    fn compose_multiplies_symbols() {
        let s = Stencil::tensor(GridType::Cell, GridType::Node, &fem::q2q1_derivative(), &fem::q2q1_mass(0.1));
        let g = s.transpose().compose(&s).unwrap();
        let th = Frequency::raw(0.7, 0.2);
        assert!((g.symbol(&th) - s.symbol(&th).norm_sqr()).norm() < 1e-15);
    }

    #[test]
    fn rejects_misaligned_offsets() {
        assert!(Stencil::<f64>::new(GridType::XEdge, GridType::Node, vec![(0, 0, 1.0)]).is_err());
    }

    #[test]
    fn shifted_accumulation_wraps() {
        let n = 4;
        let x: Vec<f64> = (0..16).map(|v| v as f64).collect();
        let mut y = vec![0.0; 16];
        accumulate_shifted(&mut y, &x, n, -1, 1, 1.0);
        // y(0,0) = x(-1, 1) = x(3, 1)
        assert_eq!(y[0], x[n + 3]);
        assert_eq!(y[3 * n + 2], x[1]);
    }
}
