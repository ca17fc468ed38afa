use crate::error::{Error, Result};
use crate::gridops::grid::{BlockGridFunction, FieldLayout};
use crate::gridops::sparse::SparseMatrix;
use crate::gridops::stencil::{apply_stencil, Stencil};
use crate::linalg::CMatrix;
use crate::scalar::Real;
use crate::symbols::Frequency;

/// Square block operator on a periodic grid, one optional stencil per
/// `(row block, col block)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator<T> {
    layout: FieldLayout,
    blocks: Vec<Vec<Option<Stencil<T>>>>,
}

impl<T: Real> BlockOperator<T> {
    pub fn zero(layout: FieldLayout) -> Self {
        let k = layout.len();
        BlockOperator { layout, blocks: vec![vec![None; k]; k] }
    }

    pub fn layout(&self) -> FieldLayout {
        self.layout
    }

    pub fn block(&self, r: usize, c: usize) -> Option<&Stencil<T>> {
        self.blocks[r][c].as_ref()
    }

    /// Stencil of block `(r, c)`, or an empty one of the right types.
    pub fn block_or_zero(&self, r: usize, c: usize) -> Stencil<T> {
        let b = self.layout.blocks();
        self.blocks[r][c].clone().unwrap_or_else(|| Stencil::zero(b[r].ty, b[c].ty))
    }

    pub fn set_block(&mut self, r: usize, c: usize, s: Stencil<T>) -> Result<()> {
        let b = self.layout.blocks();
        if s.row != b[r].ty || s.col != b[c].ty {
            return Err(Error::InvalidParameter(format!(
                "stencil {:?}←{:?} does not fit block ({r}, {c})",
                s.row, s.col
            )));
        }
        self.blocks[r][c] = if s.entries.is_empty() { None } else { Some(s) };
        Ok(())
    }

    /// `y = K x`.
    pub fn apply(&self, x: &BlockGridFunction<T>) -> Result<BlockGridFunction<T>> {
        let mut y = BlockGridFunction::zeros(self.layout, x.n());
        self.apply_add(x, &mut y)?;
        Ok(y)
    }

    /// `y += K x`.
    pub fn apply_add(&self, x: &BlockGridFunction<T>, y: &mut BlockGridFunction<T>) -> Result<()> {
        if x.layout() != self.layout {
            return Err(Error::InvalidParameter(format!("operator on {:?} applied to {:?}", self.layout, x.layout())));
        }
        x.check_compatible(y)?;
        let n = x.n();
        for (r, row) in self.blocks.iter().enumerate() {
            for (c, s) in row.iter().enumerate() {
                if let Some(s) = s {
                    apply_stencil(s, x.block(c), y.block_mut(r), n);
                }
            }
        }
        Ok(())
    }

    /// `b - K x`.
    pub fn residual(&self, x: &BlockGridFunction<T>, b: &BlockGridFunction<T>) -> Result<BlockGridFunction<T>> {
        let mut r = b.clone();
        let kx = self.apply(x)?;
        r.axpy(-T::one(), &kx);
        Ok(r)
    }

    /// Fourier symbol in the same convention as the analytic system symbols.
    pub fn symbol(&self, theta: &Frequency<T>) -> CMatrix<T> {
        let k = self.layout.len();
        CMatrix::from_fn(k, k, |r, c| {
            self.blocks[r][c].as_ref().map(|s| s.symbol(theta)).unwrap_or_default()
        })
    }

    /// Centre coefficients of the diagonal blocks.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.layout.len()).map(|b| self.blocks[b][b].as_ref().map(|s| s.center()).unwrap_or(T::zero())).collect()
    }

    /// Largest whole-cell reach over all blocks.
    pub fn reach(&self) -> i32 {
        self.blocks.iter().flatten().flatten().map(|s| s.reach()).max().unwrap_or(0)
    }

    pub fn transpose(&self) -> Self {
        let k = self.layout.len();
        let mut out = Self::zero(self.layout);
        for r in 0..k {
            for c in 0..k {
                out.blocks[c][r] = self.blocks[r][c].as_ref().map(|s| s.transpose());
            }
        }
        out
    }

    /// Assembled matrix on an `n × n` grid. Unknowns are numbered block by
    /// block, each block row-major.
    pub fn assemble(&self, n: usize) -> SparseMatrix<T> {
        let k = self.layout.len();
        let nn = n * n;
        let ni = n as i32;
        let mut trip = Vec::new();
        for (r, row) in self.blocks.iter().enumerate() {
            for (c, s) in row.iter().enumerate() {
                let Some(s) = s else { continue };
                let offs = s.cell_offsets();
                for j in 0..ni {
                    for i in 0..ni {
                        for &(di, dj, w) in &offs {
                            let ci = (i + di).rem_euclid(ni) as usize;
                            let cj = (j + dj).rem_euclid(ni) as usize;
                            trip.push((r * nn + (j * ni + i) as usize, c * nn + cj * n + ci, w));
                        }
                    }
                }
            }
        }
        SparseMatrix::from_triplets(k * nn, k * nn, trip)
    }
}

/// Flattens a grid function in the numbering used by [`BlockOperator::assemble`].
pub fn flatten<T: Real>(x: &BlockGridFunction<T>) -> Vec<T> {
    x.blocks().iter().flatten().copied().collect()
}

pub fn unflatten<T: Real>(layout: FieldLayout, n: usize, v: &[T]) -> Result<BlockGridFunction<T>> {
    let nn = n * n;
    if v.len() != layout.len() * nn {
        return Err(Error::SizeMismatch { expected: layout.len() * nn, got: v.len() });
    }
    BlockGridFunction::from_blocks(layout, n, v.chunks(nn).map(|c| c.to_vec()).collect())
}
