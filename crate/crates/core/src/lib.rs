//! Sparse spectral calculus on the unit disk in a Jacobi-polynomial basis.
//!
//! Functions are expanded as `f(r, θ) = Σ_m e^{imθ} Σ_n f_{m,n} Q_n^{k,m}(r)`.
//! Differentiation, multiplication by `r`, conversion between levels `k` and
//! smooth radial coefficients all act as narrow banded matrices on the
//! coefficient columns.

pub mod bandlinalg;
pub mod basis;
pub mod error;
pub mod jacobi;
pub mod ncc;
pub mod scalar;
pub mod sparseops;
pub mod tensor;
pub mod transform;

pub use basis::BasisId;
pub use error::{DiskError, Result};
pub use sparseops::BandedMatrix;
