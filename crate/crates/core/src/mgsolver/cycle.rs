use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gridops::grid::check_grid_size;
use crate::gridops::{galerkin_coarsen, system_operator, BlockFftSolver, BlockGridFunction, BlockOperator, CoarsestSolver, Transfer};
use crate::lfa::Coarsening;
use crate::mgsolver::relax::{LevelRelaxation, SchurContext};
use crate::relaxation::RelaxScheme;
use crate::scalar::Real;
use crate::symbols::DiscretizationSpec;

/// Residual norm past which a run is declared divergent.
pub const OVERFLOW: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CycleKind {
    V,
    W,
    /// Two levels with an exact coarse solve.
    TwoGrid,
}

impl CycleKind {
    pub fn label(self) -> &'static str {
        match self {
            CycleKind::V => "V",
            CycleKind::W => "W",
            CycleKind::TwoGrid => "TG",
        }
    }
}

impl fmt::Display for CycleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CycleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v" => Ok(CycleKind::V),
            "w" => Ok(CycleKind::W),
            "tg" | "twogrid" | "two-grid" => Ok(CycleKind::TwoGrid),
            _ => Err(Error::Parse(format!("unknown cycle '{s}' (expected V, W or TG)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleSpec {
    pub cycle: CycleKind,
    pub nu1: usize,
    pub nu2: usize,
    pub coarsening: Coarsening,
}

impl CycleSpec {
    /// The coarsest mesh has this many elements per direction (4 elements).
    pub const COARSEST_N: usize = 2;

    pub fn new(cycle: CycleKind, nu1: usize, nu2: usize, coarsening: Coarsening) -> Self {
        CycleSpec { cycle, nu1, nu2, coarsening }
    }

    pub fn w(nu1: usize, nu2: usize) -> Self {
        Self::new(CycleKind::W, nu1, nu2, Coarsening::Rediscretize)
    }

    pub fn label(&self) -> String {
        format!("{}({},{})", self.cycle, self.nu1, self.nu2)
    }
}

enum CoarseSolve<T: Real> {
    Dense(CoarsestSolver<T>),
    Fft(BlockFftSolver<T>),
}

struct Level<T: Real> {
    n: usize,
    op: BlockOperator<T>,
    relax: Option<LevelRelaxation<T>>,
}

/// Multigrid hierarchy for the periodic saddle-point problem on an `n × n` mesh.
pub struct Multigrid<T: Real> {
    spec: DiscretizationSpec<T>,
    cycle: CycleSpec,
    levels: Vec<Level<T>>,
    transfer: Transfer<T>,
    coarse: CoarseSolve<T>,
}

impl<T: Real> Multigrid<T> {
    /// Builds operators on every level. `spec.h` must equal `1/n`.
    pub fn new(spec: &DiscretizationSpec<T>, cycle: CycleSpec, scheme: &RelaxScheme<T>, n: usize) -> Result<Self> {
        check_grid_size(n)?;
        if n < 4 {
            return Err(Error::BadGridSize(n));
        }
        let depth = match cycle.cycle {
            CycleKind::TwoGrid => 2,
            _ => (n / CycleSpec::COARSEST_N).trailing_zeros() as usize + 1,
        };
        // operators on all levels down to the coarsest mesh; inner Schur
        // hierarchies need them even for two-grid cycles
        let full_depth = (n / CycleSpec::COARSEST_N).trailing_zeros() as usize + 1;
        let mut ops = vec![system_operator(spec)?];
        let mut level_spec = *spec;
        for _ in 1..full_depth {
            level_spec = level_spec.coarse();
            let next = match cycle.coarsening {
                Coarsening::Rediscretize => system_operator(&level_spec)?,
                Coarsening::Galerkin => galerkin_coarsen(ops.last().expect("finest level"))?,
            };
            ops.push(next);
        }
        let mut levels = Vec::with_capacity(depth);
        let mut h = spec.h;
        for l in 0..depth {
            let n_l = n >> l;
            let relax = if l + 1 < depth {
                let ctx = SchurContext { ops: &ops[l..], coarsening: cycle.coarsening };
                Some(LevelRelaxation::new(scheme, h, n_l, ctx)?)
            } else {
                None
            };
            levels.push(Level { n: n_l, op: ops[l].clone(), relax });
            h = h * T::lit(2.0);
        }
        let last = levels.last().expect("at least two levels");
        let coarse = match cycle.cycle {
            CycleKind::TwoGrid => CoarseSolve::Fft(BlockFftSolver::new(&last.op, last.n)),
            _ => CoarseSolve::Dense(CoarsestSolver::new(&last.op, last.n)),
        };
        let transfer = Transfer::new(ops[0].layout());
        Ok(Multigrid { spec: *spec, cycle, levels, transfer, coarse })
    }

    pub fn spec(&self) -> &DiscretizationSpec<T> {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.levels[0].n
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn operator(&self) -> &BlockOperator<T> {
        &self.levels[0].op
    }

    /// One relaxation sweep on the finest level.
    pub fn relax(&self, x: &mut BlockGridFunction<T>, b: &BlockGridFunction<T>) -> Result<()> {
        let l = &self.levels[0];
        l.relax.as_ref().expect("finest level relaxes").relax(&l.op, x, b)
    }

    fn solve_coarse(&self, b: &BlockGridFunction<T>) -> Result<BlockGridFunction<T>> {
        match &self.coarse {
            CoarseSolve::Dense(s) => s.solve(b),
            CoarseSolve::Fft(s) => s.solve(b),
        }
    }

    fn cycle_at(&self, l: usize, x: &mut BlockGridFunction<T>, b: &BlockGridFunction<T>) -> Result<()> {
        if l + 1 == self.levels.len() {
            *x = self.solve_coarse(b)?;
            return Ok(());
        }
        let level = &self.levels[l];
        let relax = level.relax.as_ref().expect("non-coarsest level relaxes");
        for _ in 0..self.cycle.nu1 {
            relax.relax(&level.op, x, b)?;
        }
        let r = level.op.residual(x, b)?;
        let rc = self.transfer.restrict(&r)?;
        let mut ec = BlockGridFunction::zeros(rc.layout(), rc.n());
        let gamma = match self.cycle.cycle {
            CycleKind::W if l + 2 < self.levels.len() => 2,
            _ => 1,
        };
        for _ in 0..gamma {
            self.cycle_at(l + 1, &mut ec, &rc)?;
        }
        x.axpy(T::one(), &self.transfer.prolong(&ec)?);
        for _ in 0..self.cycle.nu2 {
            relax.relax(&level.op, x, b)?;
        }
        Ok(())
    }

    /// One multigrid cycle for `K x = b` on the finest level.
    pub fn cycle(&self, x: &mut BlockGridFunction<T>, b: &BlockGridFunction<T>) -> Result<()> {
        x.check_compatible(b)?;
        if x.n() != self.n() {
            return Err(Error::SizeMismatch { expected: self.n(), got: x.n() });
        }
        self.cycle_at(0, x, b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `(‖d_k‖ / ‖d_0‖)^(1/k)` over the cycles actually run.
    pub rho_hat: f64,
    /// `‖d_0‖, …, ‖d_k‖`.
    pub residual_history: Vec<f64>,
    pub k: usize,
    pub seed: u64,
    /// Set when the residual overflowed or became non-finite.
    pub diverged: bool,
}

impl ConvergenceReport {
    pub fn display_rho(&self) -> String {
        if self.diverged {
            format!("diverged(>{:.3})", self.rho_hat)
        } else {
            format!("{:.3}", self.rho_hat)
        }
    }
}

/// Runs `k` cycles on the homogeneous problem from a seeded random initial
/// guess and reports the averaged convergence factor.
pub fn measure_rho_hat<T: Real>(mg: &Multigrid<T>, k: usize, seed: u64) -> Result<ConvergenceReport> {
    let n = mg.n();
    let layout = mg.operator().layout();
    let mut x = BlockGridFunction::<T>::random(layout, n, seed);
    x.remove_means();
    measure_from(mg, x, k, seed)
}

/// As [`measure_rho_hat`] but from a given initial guess.
pub fn measure_from<T: Real>(mg: &Multigrid<T>, mut x: BlockGridFunction<T>, k: usize, seed: u64) -> Result<ConvergenceReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let b = BlockGridFunction::zeros(x.layout(), x.n());
    let norm = |x: &BlockGridFunction<T>| -> Result<f64> { Ok(mg.operator().residual(x, &b)?.norm2().to_f64_lossy()) };
    let d0 = norm(&x)?;
    let mut history = vec![d0];
    let mut diverged = false;
    for _ in 0..k {
        mg.cycle(&mut x, &b)?;
        x.remove_means();
        let d = norm(&x)?;
        history.push(d);
        if !d.is_finite() || d > OVERFLOW {
            diverged = true;
            break;
        }
    }
    let steps = history.len() - 1;
    let last = *history.last().expect("non-empty");
    let rho_hat = if d0 == 0.0 {
        0.0
    } else if last.is_finite() {
        (last / d0).powf(1.0 / steps as f64)
    } else {
        f64::INFINITY
    };
    Ok(ConvergenceReport { rho_hat, residual_history: history, k: steps, seed, diverged })
}
