//! Relaxation schemes and multigrid cycles on periodic grids, convergence
//! measurement and the per-sweep cost model.

pub mod cost;
pub mod cycle;
pub mod relax;

pub use cost::{cost_model, relative_efficiency, CostReport};
pub use cycle::{measure_from, measure_rho_hat, ConvergenceReport, CycleKind, CycleSpec, Multigrid};
pub use relax::{schur_stencil, LevelRelaxation, ScalarHierarchy};
