use crate::error::Result;
use crate::fem::{self, Entry1};
use crate::gridops::grid::{FieldLayout, GridType};
use crate::gridops::operator::BlockOperator;
use crate::gridops::stencil::Stencil;
use crate::scalar::Real;
use crate::symbols::{Discretization, DiscretizationSpec};

fn sum2<T: Real>(row: GridType, col: GridType, a: (&[Entry1<T>], &[Entry1<T>]), b: (&[Entry1<T>], &[Entry1<T>])) -> Stencil<T> {
    Stencil::tensor(row, col, a.0, a.1).add(&Stencil::tensor(row, col, b.0, b.1)).expect("same types")
}

/// Q1 Laplacian `∫ ∇φ·∇ψ` on the nodes.
pub fn q1_laplacian<T: Real>(h: T) -> Stencil<T> {
    let (k, m) = (fem::q1_stiffness(h), fem::q1_mass(h));
    sum2(GridType::Node, GridType::Node, (&k, &m), (&m, &k))
}

/// Q1 mass matrix on the nodes.
pub fn q1_mass<T: Real>(h: T) -> Stencil<T> {
    let m = fem::q1_mass(h);
    Stencil::tensor(GridType::Node, GridType::Node, &m, &m)
}

/// Nodal average `(1/4)(1 + E_x)(1 + E_y)`-type stencil whose symbol is
/// `(1 + cos θ1)(1 + cos θ2)/4`.
pub fn q1_projection<T: Real>() -> Stencil<T> {
    let q = 1.0 / 16.0;
    Stencil::from_printed(&[&[q, 2.0 * q, q], &[2.0 * q, 4.0 * q, 2.0 * q], &[q, 2.0 * q, q]]).expect("valid")
}

/// Pressure stabilization `C` (entering the system as `-C`).
pub fn stabilization<T: Real>(spec: &DiscretizationSpec<T>) -> Stencil<T> {
    let h = spec.h;
    match spec.kind {
        Discretization::PoSD => q1_laplacian(h).scaled(spec.beta * h * h),
        Discretization::PrSD => {
            q1_mass(h).sub(&q1_projection().scaled(h * h)).expect("same types").scaled(spec.beta)
        }
        Discretization::Q2Q1 => Stencil::zero(GridType::Node, GridType::Node),
    }
}

/// Velocity Laplacian coupling between two velocity sub-grid types.
pub fn velocity_laplacian<T: Real>(kind: Discretization, h: T, row: GridType, col: GridType) -> Stencil<T> {
    match kind {
        Discretization::Q2Q1 => {
            let (k, m) = (fem::q2_stiffness(h), fem::q2_mass(h));
            sum2(row, col, (&k, &m), (&m, &k))
        }
        _ => q1_laplacian(h),
    }
}

/// Gradient couplings `Bxᵀ`, `Byᵀ` into one velocity sub-grid type.
pub fn gradient<T: Real>(kind: Discretization, h: T, row: GridType) -> (Stencil<T>, Stencil<T>) {
    let (d, m) = match kind {
        Discretization::Q2Q1 => (fem::q2q1_derivative(), fem::q2q1_mass(h)),
        _ => (fem::q1_derivative(), fem::q1_mass(h)),
    };
    (Stencil::tensor(row, GridType::Node, &d, &m), Stencil::tensor(row, GridType::Node, &m, &d))
}

/// Assembled saddle-point operator `[[A, 0, Bxᵀ], [0, A, Byᵀ], [Bx, By, -C]]`.
pub fn system_operator<T: Real>(spec: &DiscretizationSpec<T>) -> Result<BlockOperator<T>> {
    let layout = FieldLayout::for_kind(spec.kind);
    let blocks = layout.blocks();
    let nv = layout.velocity_types();
    let p = layout.pressure();
    let mut op = BlockOperator::zero(layout);
    for r in 0..nv {
        for c in 0..nv {
            let a = velocity_laplacian(spec.kind, spec.h, blocks[r].ty, blocks[c].ty);
            op.set_block(r, c, a.clone())?;
            op.set_block(nv + r, nv + c, a)?;
        }
        let (gx, gy) = gradient(spec.kind, spec.h, blocks[r].ty);
        op.set_block(p, r, gx.transpose())?;
        op.set_block(p, nv + r, gy.transpose())?;
        op.set_block(r, p, gx)?;
        op.set_block(nv + r, p, gy)?;
    }
    op.set_block(p, p, stabilization(spec).scaled(-T::one()))?;
    Ok(op)
}

/// Scalar operator wrapped as a one-block operator on the nodes.
pub fn scalar_operator<T: Real>(s: Stencil<T>) -> Result<BlockOperator<T>> {
    let mut op = BlockOperator::zero(FieldLayout::Scalar);
    op.set_block(0, 0, s)?;
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{sample_grid, system_symbol};

    #[test]
    fn operator_symbol_matches_analytic_symbol() {
        for spec in [DiscretizationSpec::posd(0.125), DiscretizationSpec::prsd(0.125), DiscretizationSpec::q2q1(0.125)] {
            let op = system_operator(&spec).unwrap();
            for th in sample_grid::<f64>(8).unwrap() {
                let d = &op.symbol(&th) - &system_symbol(&spec, &th);
                assert!(d.max_abs() < 1e-14, "{} at {th}", spec.kind);
            }
        }
    }

    #[test]
    fn stabilization_stencils_print_as_expected() {
        let h: f64 = 0.5;
        let c = stabilization(&DiscretizationSpec::prsd(h).with_beta(1.0));
        let p = c.printed();
        // (h²/36)[1 4 1; 4 16 4; 1 4 1] minus (h²/16)[1 2 1; 2 4 2; 1 2 1]
        let h2 = h * h;
        assert!((p[1][1] - h2 * (16.0 / 36.0 - 0.25)).abs() < 1e-15);
        assert!((p[0][0] - h2 * (1.0 / 36.0 - 1.0 / 16.0)).abs() < 1e-15);
        assert!(c.row_sum().abs() < 1e-15);
        assert!(stabilization(&DiscretizationSpec::posd(h)).row_sum().abs() < 1e-15);
    }

    #[test]
    fn gradient_annihilates_constants() {
        let op = system_operator(&DiscretizationSpec::<f64>::q2q1(0.25)).unwrap();
        for r in 0..9 {
            let s: f64 = (0..8).map(|c| op.block_or_zero(r, c).row_sum()).sum();
            assert!(s.abs() < 1e-13, "velocity part of row {r}");
        }
    }
}
