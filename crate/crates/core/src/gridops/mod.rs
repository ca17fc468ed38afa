//! Periodic grids, stencil operators, transfers, Galerkin coarsening and exact
//! constant-coefficient solvers.

pub mod coarsest;
pub mod discretize;
pub mod fft;
pub mod galerkin;
pub mod grid;
pub mod io;
pub mod operator;
pub mod sparse;
pub mod stencil;
pub mod transfer;

pub use coarsest::CoarsestSolver;
pub use discretize::system_operator;
pub use fft::{BlockFftSolver, ScalarFftSolver};
pub use galerkin::galerkin_coarsen;
pub use grid::{BlockGridFunction, Component, FieldLayout, GridType};
pub use operator::BlockOperator;
pub use sparse::SparseMatrix;
pub use stencil::Stencil;
pub use transfer::Transfer;
