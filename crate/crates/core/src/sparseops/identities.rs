//! The commutation relations linking differentiation, multiplication by `r`
//! and conversion, checked on truncated sections.
//!
//! Finite sections only commute away from the cut, so every comparison
//! ignores the trailing [`MASK`] columns.

use serde::Serialize;

use crate::basis::BasisId;
use crate::error::Result;
use crate::sparseops::{BandedMatrix, OperatorKind, OperatorTag};

/// Trailing columns excluded from each comparison.
pub const MASK: usize = 2;

/// Supplies operators to the identity checks; tests substitute faulty sources.
pub trait OperatorSource {
    fn op(&self, kind: OperatorKind, source: BasisId, n: usize) -> Result<BandedMatrix>;
}

/// The library's own operators.
#[derive(Debug, Default, Clone, Copy)]
pub struct Factory;

impl OperatorSource for Factory {
    fn op(&self, kind: OperatorKind, source: BasisId, n: usize) -> Result<BandedMatrix> {
        OperatorTag::new(kind, source).build(n)
    }
}

/// Outcome of one identity on one `(k, m, N)`.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub k: u32,
    pub m: u32,
    pub n: usize,
    pub deviation: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

fn b(k: u32, m: u32) -> BasisId {
    BasisId::new(k, m)
}

/// Runs every identity that is defined at `(k, m)`; requires `m ≥ 1`.
pub fn check_all<S: OperatorSource>(
    src: &S,
    k: u32,
    m: u32,
    n: usize,
    tol: f64,
) -> Result<Vec<IdentityCheck>> {
    use OperatorKind::*;
    let cols = n.saturating_sub(MASK);
    let op = |kind, k, m| src.op(kind, b(k, m), n);
    let mut out = Vec::new();
    let mut record = |name: &'static str, lhs: BandedMatrix, rhs: BandedMatrix, cols: usize| {
        out.push(IdentityCheck {
            name,
            k,
            m,
            n,
            deviation: lhs.max_deviation(&rhs, cols),
            tolerance: tol,
        });
    };
    let sqrt2 = std::f64::consts::SQRT_2;
    let c = op(C, k, m)?;

    // [D⁺, R⁻] = √2 C
    let lhs = op(Dplus, k, m - 1)?
        .product(&op(Rminus, k, m)?)?
        .sub(&op(Rminus, k + 1, m + 1)?.product(&op(Dplus, k, m)?)?)?;
    record("heisenberg_dplus_rminus", lhs, c.scale(sqrt2), cols);

    // [D⁻, R⁺] = √2 C
    let lhs = op(Dminus, k, m + 1)?
        .product(&op(Rplus, k, m)?)?
        .sub(&op(Rplus, k + 1, m - 1)?.product(&op(Dminus, k, m)?)?)?;
    record("heisenberg_dminus_rplus", lhs, c.scale(sqrt2), cols);

    // D⁻D⁺ = D⁺D⁻
    let lhs = op(Dminus, k + 1, m + 1)?.product(&op(Dplus, k, m)?)?;
    let rhs = op(Dplus, k + 1, m - 1)?.product(&op(Dminus, k, m)?)?;
    record("d_commute", lhs, rhs, cols);

    // R⁻R⁺ = R⁺R⁻
    let lhs = op(Rminus, k, m + 1)?.product(&op(Rplus, k, m)?)?;
    let rhs = op(Rplus, k, m - 1)?.product(&op(Rminus, k, m)?)?;
    record("r_commute", lhs, rhs, cols);

    // R⁺D⁻ - R⁻D⁺ = √2 m C
    let lhs = op(Rplus, k + 1, m - 1)?
        .product(&op(Dminus, k, m)?)?
        .sub(&op(Rminus, k + 1, m + 1)?.product(&op(Dplus, k, m)?)?)?;
    record("angular", lhs, c.scale(sqrt2 * m as f64), cols);

    // R⁺ = (R⁻)ᵀ between neighbouring m
    let rp = op(Rplus, k, m)?;
    let rmt = op(Rminus, k, m + 1)?.transpose();
    record("r_adjoint", rp, rmt, n);

    // Z = 2R⁻R⁺ - I
    let z = op(Z, k, m)?;
    let zz = op(Rminus, k, m + 1)?
        .product(&op(Rplus, k, m)?)?
        .scale(2.0)
        .sub(&BandedMatrix::identity(n, b(k, m)))?;
    record("z_product", z, zz, n);

    if k >= 1 {
        // C† D± - D± C† = √2 R±
        let lhs = op(Cdag, k + 1, m + 1)?
            .product(&op(Dplus, k, m)?)?
            .sub(&op(Dplus, k - 1, m)?.product(&op(Cdag, k, m)?)?)?;
        record("cdag_dplus", lhs, op(Rplus, k, m)?.scale(sqrt2), cols);
        let lhs = op(Cdag, k + 1, m - 1)?
            .product(&op(Dminus, k, m)?)?
            .sub(&op(Dminus, k - 1, m)?.product(&op(Cdag, k, m)?)?)?;
        record("cdag_dminus", lhs, op(Rminus, k, m)?.scale(sqrt2), cols);
    }
    Ok(out)
}

/// Runs [`check_all`] over `k ∈ 0..=k_max`, `m ∈ 1..=m_max`.
pub fn check_grid<S: OperatorSource>(
    src: &S,
    k_max: u32,
    m_max: u32,
    n: usize,
    tol: f64,
) -> Result<Vec<IdentityCheck>> {
    let mut out = Vec::new();
    for k in 0..=k_max {
        for m in 1..=m_max {
            out.extend(check_all(src, k, m, n, tol)?);
        }
    }
    Ok(out)
}
