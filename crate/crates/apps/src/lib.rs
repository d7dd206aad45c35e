//! End-to-end solvers for the disk examples: Bessel eigenvalues, inertial
//! waves, pipe-flow stability and the forced Helmholtz equation.

pub mod bessel;
pub mod bessel_modes;
pub mod config;
pub mod fields;
pub mod helmholtz;
pub mod inertial;
pub mod opscheck;
pub mod pipe;
pub mod run;
