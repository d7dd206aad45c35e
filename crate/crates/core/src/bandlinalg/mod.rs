//! Banded and block-banded linear algebra: LU solves, boundary-row
//! insertion, Galerkin recombination and dense generalized eigensolution.

mod block;
mod eig;
mod solve;

pub use block::{Block, BlockSystem, BoundaryRow, Field, Recombination};
pub use eig::{
    by_real_ascending, by_real_descending, generalized_eig, pair_residual, refine_mode, EigOptions,
    EigenResult, RefinedMode, INFINITE_THRESHOLD,
};
pub use solve::{band_solve, BandLu};
