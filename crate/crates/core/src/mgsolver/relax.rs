use crate::error::{Error, Result};
use crate::gridops::discretize::{q1_laplacian, q1_mass, scalar_operator};
use crate::gridops::grid::FieldLayout;
use crate::gridops::stencil::{apply_stencil, Stencil};
use crate::gridops::{galerkin_coarsen, BlockGridFunction, BlockOperator, CoarsestSolver, ScalarFftSolver, Transfer};
use crate::lfa::Coarsening;
use crate::relaxation::{RelaxScheme, SchemeKind};
use crate::scalar::Real;

/// Index helpers for the velocity and pressure blocks of a saddle operator.
fn velocity_blocks(layout: FieldLayout) -> std::ops::Range<usize> {
    0..2 * layout.velocity_types()
}

/// Schur stencil `B(αD)⁻¹Bᵀ + C` read off the blocks of `op`.
pub fn schur_stencil<T: Real>(op: &BlockOperator<T>, alpha: T) -> Result<Stencil<T>> {
    let layout = op.layout();
    let p = layout.pressure();
    let mut s = op.block_or_zero(p, p).scaled(-T::one());
    for k in velocity_blocks(layout) {
        let d = alpha * op.block_or_zero(k, k).center();
        let bk = op.block_or_zero(p, k).compose(&op.block_or_zero(k, p))?;
        s = s.add(&bk.scaled(d.recip()))?;
    }
    Ok(s)
}

/// Pressure block `BBᵀ + C·A_p` of the distributed operator.
pub fn distributed_stencil<T: Real>(op: &BlockOperator<T>) -> Result<Stencil<T>> {
    let layout = op.layout();
    let p = layout.pressure();
    let c = op.block_or_zero(p, p).scaled(-T::one());
    let mut g = c.compose(&q1_laplacian(T::one()))?;
    for k in velocity_blocks(layout) {
        g = g.add(&op.block_or_zero(p, k).compose(&op.block_or_zero(k, p))?)?;
    }
    Ok(g)
}

/// Nested multigrid for a scalar nodal operator: W(1,1) cycles with weighted
/// Jacobi, bilinear transfers and a pseudo-inverse on the coarsest grid.
pub struct ScalarHierarchy<T: Real> {
    levels: Vec<(usize, Stencil<T>)>,
    coarsest: CoarsestSolver<T>,
    transfer: Transfer<T>,
    omega_j: T,
}

impl<T: Real> ScalarHierarchy<T> {
    /// `stencils[i]` acts on the grid of size `n / 2^i`; the last one is the coarsest.
    pub fn new(n: usize, stencils: Vec<Stencil<T>>, omega_j: T) -> Result<Self> {
        let last = stencils.last().ok_or(Error::EmptyGrid)?.clone();
        let coarse_n = n >> (stencils.len() - 1);
        let coarsest = CoarsestSolver::new(&scalar_operator(last)?, coarse_n);
        let levels = stencils.into_iter().enumerate().map(|(i, s)| (n >> i, s)).collect();
        Ok(ScalarHierarchy { levels, coarsest, transfer: Transfer::new(FieldLayout::Scalar), omega_j })
    }

    fn apply(&self, level: usize, x: &[T]) -> Vec<T> {
        let (n, s) = &self.levels[level];
        let mut y = vec![T::zero(); n * n];
        apply_stencil(s, x, &mut y, *n);
        y
    }

    fn jacobi(&self, level: usize, x: &mut [T], b: &[T]) {
        let w = self.omega_j / self.levels[level].1.center();
        let ax = self.apply(level, x);
        for ((xv, &bv), &av) in x.iter_mut().zip(b).zip(&ax) {
            *xv = *xv + w * (bv - av);
        }
    }

    fn cycle(&self, level: usize, x: &mut Vec<T>, b: &[T]) -> Result<()> {
        let n = self.levels[level].0;
        if level + 1 == self.levels.len() {
            let rhs = BlockGridFunction::from_blocks(FieldLayout::Scalar, n, vec![b.to_vec()])?;
            *x = self.coarsest.solve(&rhs)?.into_blocks().remove(0);
            return Ok(());
        }
        self.jacobi(level, x, b);
        let ax = self.apply(level, x);
        let r: Vec<T> = b.iter().zip(&ax).map(|(&bv, &av)| bv - av).collect();
        let rf = BlockGridFunction::from_blocks(FieldLayout::Scalar, n, vec![r])?;
        let rc = self.transfer.restrict(&rf)?.into_blocks().remove(0);
        let mut ec = vec![T::zero(); rc.len()];
        for _ in 0..2 {
            self.cycle(level + 1, &mut ec, &rc)?;
        }
        let ecf = BlockGridFunction::from_blocks(FieldLayout::Scalar, n / 2, vec![ec])?;
        let ef = self.transfer.prolong(&ecf)?;
        for (xv, &ev) in x.iter_mut().zip(ef.block(0)) {
            *xv = *xv + ev;
        }
        self.jacobi(level, x, b);
        Ok(())
    }

    /// `cycles` W(1,1) cycles from a zero initial guess.
    pub fn solve(&self, b: &[T], cycles: usize) -> Result<Vec<T>> {
        let mut x = vec![T::zero(); b.len()];
        for _ in 0..cycles {
            self.cycle(0, &mut x, b)?;
        }
        Ok(x)
    }
}

/// Approximate inverse of the pressure Schur complement used by a scheme.
pub enum PressureSolve<T: Real> {
    /// Exact minimum-norm solve by FFT.
    Exact(ScalarFftSolver<T>),
    /// `m` weighted-Jacobi sweeps from zero.
    Jacobi { stencil: Stencil<T>, weight: T, sweeps: usize, n: usize },
    /// Nested W(1,1) cycles from zero.
    Inner { hierarchy: ScalarHierarchy<T>, cycles: usize },
    /// Division by a constant.
    Diagonal(T),
}

impl<T: Real> PressureSolve<T> {
    pub fn solve(&self, q: &[T]) -> Result<Vec<T>> {
        Ok(match self {
            PressureSolve::Exact(f) => f.solve(q),
            PressureSolve::Jacobi { stencil, weight, sweeps, n } => {
                let mut z = vec![T::zero(); q.len()];
                for _ in 0..*sweeps {
                    let mut sz = vec![T::zero(); q.len()];
                    apply_stencil(stencil, &z, &mut sz, *n);
                    for ((zv, &qv), &sv) in z.iter_mut().zip(q).zip(&sz) {
                        *zv = *zv + *weight * (qv - sv);
                    }
                }
                z
            }
            PressureSolve::Inner { hierarchy, cycles } => hierarchy.solve(q, *cycles)?,
            PressureSolve::Diagonal(d) => q.iter().map(|&v| v / *d).collect(),
        })
    }
}

enum Kind<T: Real> {
    Dwj { a_p: Stencil<T>, g: Option<Stencil<T>> },
    Braess(PressureSolve<T>),
    Uzawa(PressureSolve<T>),
}

/// Relaxation on one level, with everything that does not depend on the
/// iterate precomputed.
pub struct LevelRelaxation<T: Real> {
    scheme: RelaxScheme<T>,
    h: T,
    n: usize,
    vel_scale: Vec<T>,
    kind: Kind<T>,
}

/// Context needed to build nested Schur hierarchies: operators of this and
/// all coarser levels.
pub struct SchurContext<'a, T: Real> {
    pub ops: &'a [BlockOperator<T>],
    pub coarsening: Coarsening,
}

impl<T: Real> LevelRelaxation<T> {
    pub fn new(scheme: &RelaxScheme<T>, h: T, n: usize, ctx: SchurContext<'_, T>) -> Result<Self> {
        scheme.validate()?;
        let op = &ctx.ops[0];
        let layout = op.layout();
        let p = scheme.params;
        let vel_alpha = if scheme.kind.is_distributive() { p.alpha1 } else { p.alpha };
        let vel_scale = velocity_blocks(layout).map(|k| (vel_alpha * op.block_or_zero(k, k).center()).recip()).collect();
        let h2 = h * h;
        let kind = match scheme.kind {
            SchemeKind::Dwj1 => Kind::Dwj { a_p: q1_laplacian(h), g: None },
            SchemeKind::Dwj2 => Kind::Dwj { a_p: q1_laplacian(h), g: Some(distributed_stencil(op)?) },
            SchemeKind::BsrExact => Kind::Braess(PressureSolve::Exact(ScalarFftSolver::new(&schur_stencil(op, p.alpha)?, n)?)),
            SchemeKind::Ibsr if p.inner_cycles > 0 => {
                // coarse Schur operators by Galerkin coarsening of S itself; a
                // rediscretized S is off by (H/h)² per level since it carries a factor h²
                let mut stencils = vec![schur_stencil(op, p.alpha)?];
                for _ in 1..ctx.ops.len() {
                    let prev = scalar_operator(stencils.last().expect("finest Schur stencil").clone())?;
                    stencils.push(galerkin_coarsen(&prev)?.block_or_zero(0, 0));
                }
                let hierarchy = ScalarHierarchy::new(n, stencils, p.omega_j)?;
                Kind::Braess(PressureSolve::Inner { hierarchy, cycles: p.inner_cycles })
            }
            SchemeKind::Ibsr => {
                let s = schur_stencil(op, p.alpha)?;
                let weight = p.omega_j / s.center();
                Kind::Braess(PressureSolve::Jacobi { stencil: s, weight, sweeps: p.sweeps.max(1), n })
            }
            SchemeKind::UzawaSchur => Kind::Uzawa(PressureSolve::Exact(ScalarFftSolver::new(&schur_stencil(op, p.alpha)?, n)?)),
            SchemeKind::UzawaMass => {
                let pp = layout.pressure();
                let s = op.block_or_zero(pp, pp).scaled(-T::one()).add(&q1_mass(h).scaled(p.delta))?;
                Kind::Uzawa(PressureSolve::Exact(ScalarFftSolver::new(&s, n)?))
            }
            SchemeKind::UzawaDiag => Kind::Uzawa(PressureSolve::Diagonal(p.sigma * h2)),
        };
        Ok(LevelRelaxation { scheme: *scheme, h, n, vel_scale, kind })
    }

    /// One relaxation sweep `x ← x + ω·δx` for `K x = b`.
    pub fn relax(&self, op: &BlockOperator<T>, x: &mut BlockGridFunction<T>, b: &BlockGridFunction<T>) -> Result<()> {
        let n = self.n;
        if x.n() != n || b.n() != n {
            return Err(Error::SizeMismatch { expected: n, got: x.n() });
        }
        let layout = op.layout();
        let pi = layout.pressure();
        let omega = self.scheme.params.omega;
        let r = op.residual(x, b)?;
        let nn = n * n;
        // scaled velocity residual (αD)⁻¹ r_u
        let t: Vec<Vec<T>> = velocity_blocks(layout)
            .map(|k| r.block(k).iter().map(|&v| v * self.vel_scale[k]).collect())
            .collect();
        // B t
        let mut bt = vec![T::zero(); nn];
        for k in velocity_blocks(layout) {
            if let Some(s) = op.block(pi, k) {
                apply_stencil(s, &t[k], &mut bt, n);
            }
        }
        let mut delta = BlockGridFunction::zeros(layout, n);
        match &self.kind {
            Kind::Dwj { a_p, g } => {
                let rp: Vec<T> = r.block(pi).iter().zip(&bt).map(|(&a, &b)| a - b).collect();
                let dp_hat = match g {
                    None => {
                        let s = (self.h * self.h * self.scheme.params.alpha2).recip();
                        rp.iter().map(|&v| v * s).collect::<Vec<T>>()
                    }
                    Some(g) => {
                        let c = self.scheme.params.omega_j / (self.h * self.h);
                        let z1: Vec<T> = rp.iter().map(|&v| v * c).collect();
                        let mut gz = vec![T::zero(); nn];
                        apply_stencil(g, &z1, &mut gz, n);
                        z1.iter().zip(&rp).zip(&gz).map(|((&z, &r), &g)| z + c * (r - g)).collect()
                    }
                };
                for k in velocity_blocks(layout) {
                    let d = delta.block_mut(k);
                    d.copy_from_slice(&t[k]);
                    if let Some(s) = op.block(k, pi) {
                        apply_stencil(s, &dp_hat, d, n);
                    }
                }
                apply_stencil(&a_p.scaled(-T::one()), &dp_hat, delta.block_mut(pi), n);
            }
            Kind::Braess(solve) => {
                let q: Vec<T> = bt.iter().zip(r.block(pi)).map(|(&a, &b)| a - b).collect();
                let dp = solve.solve(&q)?;
                for k in velocity_blocks(layout) {
                    let mut g = vec![T::zero(); nn];
                    if let Some(s) = op.block(k, pi) {
                        apply_stencil(s, &dp, &mut g, n);
                    }
                    let sc = self.vel_scale[k];
                    for ((d, &tv), &gv) in delta.block_mut(k).iter_mut().zip(&t[k]).zip(&g) {
                        *d = tv - sc * gv;
                    }
                }
                delta.block_mut(pi).copy_from_slice(&dp);
            }
            Kind::Uzawa(solve) => {
                let q: Vec<T> = bt.iter().zip(r.block(pi)).map(|(&a, &b)| a - b).collect();
                let dp = solve.solve(&q)?;
                for k in velocity_blocks(layout) {
                    delta.block_mut(k).copy_from_slice(&t[k]);
                }
                delta.block_mut(pi).copy_from_slice(&dp);
            }
        }
        x.axpy(omega, &delta);
        Ok(())
    }
}
