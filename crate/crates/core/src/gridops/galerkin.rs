use crate::error::Result;
use crate::gridops::operator::BlockOperator;
use crate::gridops::stencil::Stencil;
use crate::gridops::transfer::Transfer;
use crate::scalar::Real;

/// Relative size below which Galerkin entries are treated as round-off.
const PRUNE: f64 = 1e-14;

/// Coarse operator `R K P` with `R = Pᵀ`.
///
/// The triple product is formed as a sparse matrix on a small periodic
/// template grid, then the coarse stencils are read off one row per block.
/// The template is wide enough that no coarse stencil wraps onto itself.
pub fn galerkin_coarsen<T: Real>(op: &BlockOperator<T>) -> Result<BlockOperator<T>> {
    let layout = op.layout();
    let transfer = Transfer::<T>::new(layout);
    let reach = op.reach() as usize;
    let nc = (2 * reach + 6).max(8).next_power_of_two();
    let nf = 2 * nc;
    let k = op.assemble(nf);
    let p = transfer.assemble(nc);
    let kc = p.transpose().matmul(&k.matmul(&p));
    let tol = T::lit(PRUNE) * kc.to_dense().iter().fold(T::zero(), |m, v| m.max(v.abs()));

    let blocks = layout.blocks();
    let ncc = nc * nc;
    let wrap = |i: usize| -> i32 {
        let i = i as i32;
        if i > nc as i32 / 2 {
            i - nc as i32
        } else {
            i
        }
    };
    let mut coarse = BlockOperator::zero(layout);
    for (r, rb) in blocks.iter().enumerate() {
        let (rx, ry) = rb.ty.half();
        let mut per_col: Vec<Vec<(i32, i32, T)>> = vec![Vec::new(); blocks.len()];
        for (col, w) in kc.row(r * ncc) {
            let c = col / ncc;
            let cell = col % ncc;
            let (cx, cy) = blocks[c].ty.half();
            let (di, dj) = (wrap(cell % nc), wrap(cell / nc));
            per_col[c].push((2 * di + cx - rx, 2 * dj + cy - ry, w));
        }
        for (c, entries) in per_col.into_iter().enumerate() {
            let s = Stencil::new(rb.ty, blocks[c].ty, entries)?.pruned(tol);
            coarse.set_block(r, c, s)?;
        }
    }
    Ok(coarse)
}
