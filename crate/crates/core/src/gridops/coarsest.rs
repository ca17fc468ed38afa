use crate::error::{Error, Result};
use crate::gridops::grid::{BlockGridFunction, FieldLayout};
use crate::gridops::operator::{flatten, unflatten, BlockOperator};
use crate::linalg::symmetric_pinv;
use crate::scalar::Real;

/// Minimum-norm least-squares solver for the (symmetric, rank-deficient)
/// operator on a very small periodic grid.
#[derive(Debug, Clone)]
pub struct CoarsestSolver<T> {
    n: usize,
    layout: FieldLayout,
    pinv: Vec<T>,
}

impl<T: Real> CoarsestSolver<T> {
    pub fn new(op: &BlockOperator<T>, n: usize) -> Self {
        let m = op.assemble(n);
        let dim = m.nrows();
        let mut a = m.to_dense();
        for i in 0..dim {
            for j in i + 1..dim {
                let s = (a[i * dim + j] + a[j * dim + i]) * T::lit(0.5);
                a[i * dim + j] = s;
                a[j * dim + i] = s;
            }
        }
        CoarsestSolver { n, layout: op.layout(), pinv: symmetric_pinv(&a, dim) }
    }

    pub fn solve(&self, rhs: &BlockGridFunction<T>) -> Result<BlockGridFunction<T>> {
        if rhs.n() != self.n || rhs.layout() != self.layout {
            return Err(Error::SizeMismatch { expected: self.n, got: rhs.n() });
        }
        let b = flatten(rhs);
        let dim = b.len();
        let x: Vec<T> = (0..dim).map(|i| (0..dim).map(|j| self.pinv[i * dim + j] * b[j]).sum()).collect();
        unflatten(self.layout, self.n, &x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridops::discretize::system_operator;
    use crate::symbols::DiscretizationSpec;

    #[test]
    fn min_norm_solution_on_four_elements() {
        for spec in [DiscretizationSpec::<f64>::posd(0.5), DiscretizationSpec::prsd(0.5), DiscretizationSpec::q2q1(0.5)] {
            let op = system_operator(&spec).unwrap();
            let solver = CoarsestSolver::new(&op, 2);
            let x0 = BlockGridFunction::random(op.layout(), 2, 3);
            let rhs = op.apply(&x0).unwrap();
            let x = solver.solve(&rhs).unwrap();
            assert!(op.residual(&x, &rhs).unwrap().norm2() < 1e-10 * rhs.norm2());
            for (_, m) in x.component_means() {
                assert!(m.abs() < 1e-12, "{}", spec.kind);
            }
            let mut c = BlockGridFunction::zeros(op.layout(), 2);
            c.fill(1.0);
            let y = solver.solve(&c).unwrap();
            let r = op.residual(&y, &c).unwrap();
            // the residual of a pure nullspace right-hand side is orthogonal to the range
            assert!(op.apply(&r).unwrap().norm2() < 1e-10);
        }
    }
}
