use crate::error::{Error, Result};
use crate::fem::Interp1;
use crate::gridops::grid::{BlockGridFunction, Component, FieldLayout, GridType};
use crate::gridops::sparse::SparseMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term<T> {
    fine: usize,
    qx: usize,
    qy: usize,
    coarse: usize,
    kx: i32,
    ky: i32,
    w: T,
}

/// Interpolation `P` from an `n/2` grid to an `n` grid and restriction `R = Pᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer<T> {
    layout: FieldLayout,
    terms: Vec<Term<T>>,
}

/// Interpolation rule for a block: quadratic for Q2 velocity sub-grids,
/// bilinear otherwise.
pub fn block_rule(layout: FieldLayout, block: usize) -> Interp1 {
    match (layout, layout.blocks()[block].component) {
        (FieldLayout::TaylorHood, Component::U | Component::V) => Interp1::Quadratic,
        _ => Interp1::Linear,
    }
}

impl<T: Real> Transfer<T> {
    pub fn new(layout: FieldLayout) -> Self {
        let blocks = layout.blocks();
        let mut terms = Vec::new();
        for (b, info) in blocks.iter().enumerate() {
            let rule = block_rule(layout, b);
            let (fx, fy) = info.ty.dofs();
            for qy in 0..2 {
                for qx in 0..2 {
                    for tx in rule.terms(fx, qx) {
                        for ty in rule.terms(fy, qy) {
                            let ct = GridType::from_dofs(tx.coarse, ty.coarse);
                            let coarse = blocks
                                .iter()
                                .position(|c| c.component == info.component && c.ty == ct)
                                .expect("coarse sub-grid of the same component");
                            terms.push(Term {
                                fine: b,
                                qx,
                                qy,
                                coarse,
                                kx: tx.cell,
                                ky: ty.cell,
                                w: T::lit(tx.weight * ty.weight),
                            });
                        }
                    }
                }
            }
        }
        Transfer { layout, terms }
    }

    pub fn layout(&self) -> FieldLayout {
        self.layout
    }

    fn check(&self, x: &BlockGridFunction<T>) -> Result<()> {
        if x.layout() != self.layout {
            return Err(Error::InvalidParameter(format!("transfer on {:?} applied to {:?}", self.layout, x.layout())));
        }
        Ok(())
    }

    /// Coarse grid function on `nc × nc` to fine on `2nc × 2nc`.
    pub fn prolong(&self, xc: &BlockGridFunction<T>) -> Result<BlockGridFunction<T>> {
        self.check(xc)?;
        let nc = xc.n();
        let nf = 2 * nc;
        let mut xf = BlockGridFunction::zeros(self.layout, nf);
        for t in &self.terms {
            let src = xc.block(t.coarse).to_vec();
            let dst = xf.block_mut(t.fine);
            for jc in 0..nc {
                let sj = (jc as i32 + t.ky).rem_euclid(nc as i32) as usize;
                let row = (2 * jc + t.qy) * nf;
                for ic in 0..nc {
                    let si = (ic as i32 + t.kx).rem_euclid(nc as i32) as usize;
                    let d = &mut dst[row + 2 * ic + t.qx];
                    *d = *d + t.w * src[sj * nc + si];
                }
            }
        }
        Ok(xf)
    }

    /// Fine grid function to coarse, the exact transpose of [`Self::prolong`].
    pub fn restrict(&self, xf: &BlockGridFunction<T>) -> Result<BlockGridFunction<T>> {
        self.check(xf)?;
        let nf = xf.n();
        if nf % 2 != 0 || nf < 4 {
            return Err(Error::BadGridSize(nf));
        }
        let nc = nf / 2;
        let mut xc = BlockGridFunction::zeros(self.layout, nc);
        for t in &self.terms {
            let src = xf.block(t.fine).to_vec();
            let dst = xc.block_mut(t.coarse);
            for jc in 0..nc {
                let sj = (jc as i32 + t.ky).rem_euclid(nc as i32) as usize;
                let row = (2 * jc + t.qy) * nf;
                for ic in 0..nc {
                    let si = (ic as i32 + t.kx).rem_euclid(nc as i32) as usize;
                    let d = &mut dst[sj * nc + si];
                    *d = *d + t.w * src[row + 2 * ic + t.qx];
                }
            }
        }
        Ok(xc)
    }

    /// Assembled `P` mapping an `nc` grid to a `2nc` grid.
    pub fn assemble(&self, nc: usize) -> SparseMatrix<T> {
        let nf = 2 * nc;
        let k = self.layout.len();
        let mut trip = Vec::new();
        for t in &self.terms {
            for jc in 0..nc {
                let sj = (jc as i32 + t.ky).rem_euclid(nc as i32) as usize;
                for ic in 0..nc {
                    let si = (ic as i32 + t.kx).rem_euclid(nc as i32) as usize;
                    let r = t.fine * nf * nf + (2 * jc + t.qy) * nf + 2 * ic + t.qx;
                    let c = t.coarse * nc * nc + sj * nc + si;
                    trip.push((r, c, t.w));
                }
            }
        }
        SparseMatrix::from_triplets(k * nf * nf, k * nc * nc, trip)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_is_adjoint_of_prolongation() {
        for layout in [FieldLayout::EqualOrder, FieldLayout::TaylorHood, FieldLayout::Scalar] {
            let t = Transfer::<f64>::new(layout);
            let xc = BlockGridFunction::random(layout, 4, 1);
            let yf = BlockGridFunction::random(layout, 8, 2);
            let lhs = t.prolong(&xc).unwrap().dot(&yf);
            let rhs = xc.dot(&t.restrict(&yf).unwrap());
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn prolongation_preserves_constants() {
        let t = Transfer::<f64>::new(FieldLayout::TaylorHood);
        let mut xc = BlockGridFunction::zeros(FieldLayout::TaylorHood, 4);
        xc.fill(1.5);
        let xf = t.prolong(&xc).unwrap();
        assert!(xf.blocks().iter().flatten().all(|&v| (v - 1.5).abs() < 1e-14));
    }

    #[test]
    fn assembled_matches_matrix_free() {
        let t = Transfer::<f64>::new(FieldLayout::TaylorHood);
        let xc = BlockGridFunction::random(FieldLayout::TaylorHood, 4, 5);
        let p = t.assemble(4);
        let a = p.matvec(&crate::gridops::operator::flatten(&xc));
        let b = crate::gridops::operator::flatten(&t.prolong(&xc).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
