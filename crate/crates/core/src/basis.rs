//! The radial basis `Q_n^{k,m}(r)` on the unit disk and its boundary rows.
//!
//! `Q_n^{k,m}(r) = r^m P_n^{(k,m)}(2r² - 1) / sqrt(N_n^{k,m})` is orthonormal on
//! `[0, 1]` under the weight `(1 - r²)^k r dr`. Values are produced with the
//! orthonormal three-term recurrence in `z = 2r² - 1`, which keeps every
//! intermediate of order one regardless of `n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DiskError, Result};
use crate::jacobi::{jacobi_norm, JacobiParams};
use crate::sparseops::BandedMatrix;

/// A node `(k, m)` of the operator lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisId {
    pub k: u32,
    pub m: u32,
}

impl BasisId {
    pub const fn new(k: u32, m: u32) -> Self {
        Self { k, m }
    }

    /// Basis for a signed Fourier index; the radial space depends only on `|m|`.
    pub fn signed(k: u32, m: i64) -> Self {
        Self {
            k,
            m: m.unsigned_abs() as u32,
        }
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, m={})", self.k, self.m)
    }
}

/// `ln N_0^{k,m}` where `N_n^{k,m} = W_n^{k,m} / 2^{2+k+m}`.
fn ln_norm0(b: BasisId) -> f64 {
    let m = b.m as f64;
    // W_0^{k,m}/2^{k+m+1} = Γ(k+1)Γ(m+1)/Γ(k+m+2) = 1/(m+1) · Π_{j=1}^{k} j/(m+1+j)
    let mut ln = -(m + 1.0).ln();
    for j in 1..=b.k {
        let j = j as f64;
        ln += j.ln() - (m + 1.0 + j).ln();
    }
    ln - std::f64::consts::LN_2
}

/// Diagonal coefficient `A_n` of the orthonormal recurrence in `z`.
pub fn recurrence_a(b: BasisId, n: usize) -> f64 {
    let (k, m, nf) = (b.k as f64, b.m as f64, n as f64);
    if n == 0 {
        return (m - k) / (k + m + 2.0);
    }
    let s = 2.0 * nf + k + m;
    (m * m - k * k) / (s * (s + 2.0))
}

/// Off-diagonal coefficient `B_n` (coupling `n - 1` and `n`); `B_0 = 0`.
pub fn recurrence_b(b: BasisId, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (k, m, nf) = (b.k as f64, b.m as f64, n as f64);
    let s = 2.0 * nf + k + m;
    2.0 / s * (nf * (nf + k) * (nf + m) * (nf + k + m) / (s * s - 1.0)).sqrt()
}

fn check_radius(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(DiskError::RadiusDomain(r))
    }
}

/// `r^m / sqrt(N_0)`, formed in log space for large `m`.
fn leading_factor(b: BasisId, r: f64) -> f64 {
    let ln0 = ln_norm0(b);
    if b.m == 0 {
        return (-0.5 * ln0).exp();
    }
    if r == 0.0 {
        return 0.0;
    }
    if b.m > 30 {
        (b.m as f64 * r.ln() - 0.5 * ln0).exp()
    } else {
        r.powi(b.m as i32) * (-0.5 * ln0).exp()
    }
}

/// Evaluates `Q_0, ..., Q_{n_max}` at one radius.
pub fn q_eval_all(b: BasisId, n_max: usize, r: f64) -> Result<Vec<f64>> {
    check_radius(r)?;
    let z = 2.0 * r * r - 1.0;
    let mut out = Vec::with_capacity(n_max + 1);
    let q0 = leading_factor(b, r);
    out.push(q0);
    if n_max == 0 {
        return Ok(out);
    }
    let mut prev = 0.0;
    let mut cur = q0;
    for n in 0..n_max {
        let next =
            ((z - recurrence_a(b, n)) * cur - recurrence_b(b, n) * prev) / recurrence_b(b, n + 1);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    Ok(out)
}

/// Evaluates `Q_n^{k,m}(r)`.
pub fn q_eval(b: BasisId, n: usize, r: f64) -> Result<f64> {
    Ok(q_eval_all(b, n, r)?[n])
}

/// The normalization `N_n^{k,m} = W_n^{k,m} / 2^{2+k+m}`.
pub fn q_norm(b: BasisId, n: usize) -> f64 {
    let p =
        JacobiParams::new(b.k as f64, b.m as f64).expect("integer lattice parameters are valid");
    jacobi_norm(n, p) / 2f64.powi(2 + b.k as i32 + b.m as i32)
}

/// Dense row evaluating a function or its radial derivative at `r = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionRow {
    pub basis: BasisId,
    pub order: u8,
    pub entries: Vec<f64>,
}

fn binom_small(top: f64, k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * (top - k as f64 + j as f64) / j as f64)
}

/// `Q_n^{k,m}(1)` for `n = 0..n_len`.
pub fn boundary_values(b: BasisId, n_len: usize) -> Vec<f64> {
    let (k, m) = (b.k as f64, b.m as f64);
    (0..n_len)
        .map(|n| {
            let nf = n as f64;
            (2.0 * (2.0 * nf + m + k + 1.0)
                * binom_small(nf + k, b.k)
                * binom_small(nf + m + k, b.k))
            .sqrt()
        })
        .collect()
}

/// `Λ_n = [2n(n+k+1) + m(2n+k+1)] / (k+1)`, the ratio `Q_n'(1) / Q_n(1)`.
pub fn lambda_entry(b: BasisId, n: usize) -> f64 {
    let (k, m, nf) = (b.k as f64, b.m as f64, n as f64);
    (2.0 * nf * (nf + k + 1.0) + m * (2.0 * nf + k + 1.0)) / (k + 1.0)
}

/// Boundary restriction row of the given derivative order (0 or 1).
pub fn restriction_row(b: BasisId, order: u8, n_len: usize) -> Result<RestrictionRow> {
    if n_len == 0 {
        return Err(DiskError::Parameter("restriction row needs N >= 1".into()));
    }
    let mut entries = boundary_values(b, n_len);
    match order {
        0 => {}
        1 => {
            for (n, e) in entries.iter_mut().enumerate() {
                *e *= lambda_entry(b, n);
            }
        }
        _ => {
            return Err(DiskError::Parameter(format!(
                "restriction order {order} not in {{0, 1}}"
            )))
        }
    }
    Ok(RestrictionRow {
        basis: b,
        order,
        entries,
    })
}

/// The diagonal operator `Λ` on `(k, m)`.
pub fn lambda_diagonal(b: BasisId, n_len: usize) -> BandedMatrix {
    let diag = (0..n_len).map(|n| lambda_entry(b, n)).collect();
    BandedMatrix::from_bands(n_len, n_len, b, b, [(0, diag)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{gauss_legendre, jacobi_eval};
    use proptest::prelude::*;

    #[test]
    fn constant_mode() {
        let b = BasisId::new(0, 0);
        assert!((q_eval(b, 0, 0.7).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(q_eval(BasisId::new(0, 3), 0, 0.0).unwrap(), 0.0);
        assert!((q_eval(b, 1, 1.0).unwrap() - 6f64.sqrt()).abs() < 1e-14);
        assert!(q_eval(b, 0, 1.2).is_err());
        assert!(q_eval(b, 0, -0.1).is_err());
    }

    #[test]
    fn matches_jacobi_definition() {
        for (k, m) in [(0, 0), (1, 2), (3, 5), (2, 11)] {
            let b = BasisId::new(k, m);
            let p = JacobiParams::new(k as f64, m as f64).unwrap();
            for n in 0..12 {
                for r in [0.1f64, 0.45, 0.8, 1.0] {
                    let z = 2.0 * r * r - 1.0;
                    let direct = r.powi(m as i32) * jacobi_eval(n, p, z) / q_norm(b, n).sqrt();
                    let rec = q_eval(b, n, r).unwrap();
                    assert!(
                        (direct - rec).abs() <= 1e-12 * direct.abs().max(1.0),
                        "{b} {n} {r}"
                    );
                }
            }
        }
    }

    #[test]
    fn orthonormal_under_quadrature() {
        let grid = gauss_legendre(48).unwrap();
        for (k, m) in [(0, 0), (1, 0), (0, 3), (2, 7), (3, 10)] {
            let b = BasisId::new(k, m);
            let vals: Vec<Vec<f64>> = grid
                .radii_r
                .iter()
                .map(|&r| q_eval_all(b, 20, r).unwrap())
                .collect();
            for n in 0..=20 {
                for np in 0..=20 {
                    let s: f64 = grid
                        .radii_r
                        .iter()
                        .zip(&grid.weights_w)
                        .zip(&vals)
                        .map(|((&r, &w), v)| 0.25 * w * (1.0 - r * r).powi(k as i32) * v[n] * v[np])
                        .sum();
                    let expect = if n == np { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-12, "{b} {n} {np} {s}");
                }
            }
        }
    }

    #[test]
    fn restriction_examples() {
        let r = restriction_row(BasisId::new(0, 0), 0, 3).unwrap();
        assert!((r.entries[0] - 2f64.sqrt()).abs() < 1e-15);
        let r1 = restriction_row(BasisId::new(0, 0), 1, 3).unwrap();
        assert_eq!(r1.entries[0], 0.0);
        let r2 = restriction_row(BasisId::new(1, 2), 0, 3).unwrap();
        assert!((r2.entries[1] - 96f64.sqrt()).abs() < 1e-13);
        assert!((q_eval(BasisId::new(1, 2), 1, 1.0).unwrap() - 96f64.sqrt()).abs() < 1e-12);
        assert!(restriction_row(BasisId::new(0, 0), 2, 3).is_err());
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_entry(BasisId::new(0, 0), 0), 0.0);
        assert_eq!(lambda_entry(BasisId::new(0, 1), 0), 1.0);
        assert!((lambda_entry(BasisId::new(2, 3), 2) - 41.0 / 3.0).abs() < 1e-15);
        let d = lambda_diagonal(BasisId::new(2, 3), 4);
        assert!((d.get(2, 2) - 41.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.get(2, 3), 0.0);
    }

    #[test]
    fn boundary_consistency() {
        for (k, m) in [(0, 0), (1, 4), (3, 2), (2, 40)] {
            let b = BasisId::new(k, m);
            let row = restriction_row(b, 0, 60).unwrap();
            let vals = q_eval_all(b, 59, 1.0).unwrap();
            for (e, v) in row.entries.iter().zip(&vals) {
                assert!(*e > 0.0);
                assert!((e - v).abs() <= 1e-13 * e, "{b} {e} {v}");
            }
        }
    }

    #[test]
    fn derivative_restriction() {
        let h = 1e-6;
        for (k, m) in [(0, 1), (1, 0), (2, 3), (0, 5)] {
            let b = BasisId::new(k, m);
            let row = restriction_row(b, 1, 8).unwrap();
            // one-sided derivative at r = 1 from a polynomial extension is not
            // available through q_eval, so use a second-order backward stencil
            for n in 0..8 {
                let f0 = q_eval(b, n, 1.0).unwrap();
                let f1 = q_eval(b, n, 1.0 - h).unwrap();
                let f2 = q_eval(b, n, 1.0 - 2.0 * h).unwrap();
                let fd = (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h);
                let expect = row.entries[n];
                assert!(
                    (fd - expect).abs() <= 1e-6 * expect.abs().max(1.0),
                    "{b} {n} {fd} {expect}"
                );
            }
        }
    }

    #[test]
    fn origin_regularity_slope() {
        let b = BasisId::new(0, 50);
        let small = q_eval(b, 0, 1e-3).unwrap();
        assert!(small.abs() < 1e-120 * 1e3 && small > 0.0);
        let a = q_eval(b, 3, 1e-3).unwrap().abs().ln();
        let c = q_eval(b, 3, 1e-1).unwrap().abs().ln();
        let slope = (c - a) / ((1e-1f64).ln() - (1e-3f64).ln());
        assert!((slope - 50.0).abs() < 0.5, "{slope}");
    }

    proptest! {
        #[test]
        fn recurrence_stays_finite(k in 0u32..4, m in 0u32..80, n in 0usize..600, r in 0.0f64..=1.0) {
            let v = q_eval(BasisId::new(k, m), n, r).unwrap();
            prop_assert!(v.is_finite());
        }
    }
}
