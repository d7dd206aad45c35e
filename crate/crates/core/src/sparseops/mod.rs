//! Banded operators between the `(k, m)` spaces.

mod banded;
mod factory;
pub mod grid_action;
pub mod identities;

pub use banded::{format_sig17, BandedMatrix};
pub use factory::{
    compose, convert, convert_down, d_minus, d_plus, d_signed, dirichlet_b, galerkin_b, operator,
    r_minus, r_plus, r_signed, z_matrix, OperatorKind, OperatorTag,
};
