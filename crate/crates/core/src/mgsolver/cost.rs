use crate::error::{Error, Result};
use crate::relaxation::{RelaxScheme, SchemeKind};

/// Multiply-adds per point for one application of a 9-point stencil.
const STENCIL: u32 = 9;
/// Nonzero blocks of the equal-order saddle operator.
const NONZERO_BLOCKS: u32 = 7;
/// Work units of one W-cycle.
const W_CYCLE_WORK_UNITS: u32 = 4;
/// Multiply-adds per point of one Schur-complement residual (25-point stencil).
const SCHUR_STENCIL: u32 = 25;

/// Per-sweep work of a relaxation on the equal-order discretizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostReport {
    /// Residual evaluation.
    pub residual: u32,
    /// Everything else in one sweep.
    pub relaxation: u32,
    pub multiply_adds_per_sweep_per_point: u32,
}

impl CostReport {
    fn new(relaxation: u32) -> Self {
        let residual = NONZERO_BLOCKS * STENCIL;
        CostReport { residual, relaxation, multiply_adds_per_sweep_per_point: residual + relaxation }
    }

    /// Work of one sweep of `self` in units of one sweep of `other`.
    pub fn work_ratio(&self, other: &CostReport) -> f64 {
        self.multiply_adds_per_sweep_per_point as f64 / other.multiply_adds_per_sweep_per_point as f64
    }
}

/// Counts for the schemes whose cost is itemized: DWJ with one or two
/// pressure sweeps, IBSR with nested W(1,1) cycles, and Uzawa with a diagonal
/// Schur approximation.
pub fn cost_model(scheme: &RelaxScheme<f64>) -> Result<CostReport> {
    // diagonal scaling of u, v, p
    let scale3 = 3;
    let dwj1 = scale3 + 5 * STENCIL; // A_p, Bx, By, Bxᵀ, Byᵀ
    match scheme.kind {
        SchemeKind::Dwj1 => Ok(CostReport::new(dwj1)),
        // the second sweep: residual of G (A_p, C, B, Bᵀ) and a scaling
        SchemeKind::Dwj2 => Ok(CostReport::new(dwj1 + 6 * STENCIL + 1)),
        SchemeKind::Ibsr if scheme.params.inner_cycles > 0 => {
            let scalings = 2 * 2;
            let transfers = 4 * STENCIL;
            let inner = scheme.params.inner_cycles as u32 * W_CYCLE_WORK_UNITS * SCHUR_STENCIL;
            Ok(CostReport::new(scalings + transfers + inner))
        }
        SchemeKind::UzawaDiag => Ok(CostReport::new(scale3 + 2 * STENCIL)),
        _ => Err(Error::UnsupportedScheme { op: "cost_model", scheme: scheme.describe() }),
    }
}

/// Error reduction of a method with factor `rho` per cycle, scaled to the work
/// of one cycle of a method that is `work_ratio` times cheaper: `rho^(1/W)`.
pub fn relative_efficiency(rho: f64, work_ratio: f64) -> f64 {
    rho.powf(work_ratio.recip())
}
