//! Multiplication by smooth axisymmetric radial coefficients.
//!
//! A coefficient `F(r)` is written as a function of `z = 2r² - 1`, expanded in
//! orthonormal polynomials `p_n(z)`, and the operator `F(Z)` is formed by
//! Clenshaw's recurrence with the Jacobi matrix `Z` in place of `z`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::basis::BasisId;
use crate::error::Result;
use crate::jacobi::gauss_legendre;
use crate::sparseops::{z_matrix, BandedMatrix};

/// Polynomial family used for the expansion in `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ExpansionKind {
    /// `p_n = √(2n+1) P_n`, orthonormal under `dz/2`.
    Legendre,
    /// `p_0 = 1`, `p_n = √2 T_n`, orthonormal under `dz / (π√(1-z²))`.
    #[default]
    Chebyshev,
}

impl ExpansionKind {
    /// Diagonal recurrence coefficient; zero for both symmetric families.
    pub fn a(&self, _n: usize) -> f64 {
        0.0
    }

    /// Off-diagonal recurrence coefficient coupling `p_{n-1}` and `p_n`.
    pub fn b(&self, n: usize) -> f64 {
        match (self, n) {
            (_, 0) => 0.0,
            (ExpansionKind::Legendre, n) => {
                let n = n as f64;
                n / (4.0 * n * n - 1.0).sqrt()
            }
            (ExpansionKind::Chebyshev, 1) => std::f64::consts::FRAC_1_SQRT_2,
            (ExpansionKind::Chebyshev, _) => 0.5,
        }
    }

    /// `p_0, ..., p_{len-1}` at `z`.
    pub fn eval_all(&self, len: usize, z: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(len);
        let mut prev = 0.0;
        let mut cur = 1.0;
        for n in 0..len {
            out.push(cur);
            let next = ((z - self.a(n)) * cur - self.b(n) * prev) / self.b(n + 1);
            prev = cur;
            cur = next;
        }
        out
    }
}

/// Truncated expansion `F(z) = Σ_{n ≤ N_F} F_n p_n(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffExpansion {
    pub kind: ExpansionKind,
    pub coeffs: Vec<f64>,
}

impl CoeffExpansion {
    pub fn new(kind: ExpansionKind, coeffs: Vec<f64>) -> Self {
        let mut e = Self { kind, coeffs };
        if e.coeffs.is_empty() {
            e.coeffs.push(0.0);
        }
        e
    }

    /// Index of the last retained coefficient.
    pub fn n_f(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval_z(&self, z: f64) -> f64 {
        let p = self.kind.eval_all(self.coeffs.len(), z);
        p.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }
}

/// Default relative drop tolerance.
pub const DEFAULT_TOL: f64 = 1e-14;
const DEFAULT_QUAD: usize = 128;

/// Projects `f(r)` onto `p_n(z)` with `r = sqrt((1+z)/2)`.
pub fn expand_radial<F: Fn(f64) -> f64>(f: F, kind: ExpansionKind, tol: f64) -> CoeffExpansion {
    expand_radial_with(f, kind, tol, DEFAULT_QUAD)
}

/// As [`expand_radial`] with an explicit number of quadrature nodes.
pub fn expand_radial_with<F: Fn(f64) -> f64>(
    f: F,
    kind: ExpansionKind,
    tol: f64,
    n_quad: usize,
) -> CoeffExpansion {
    let mut coeffs = vec![0.0; n_quad];
    match kind {
        ExpansionKind::Legendre => {
            let g = gauss_legendre(n_quad).expect("quadrature size is positive");
            for (&z, &w) in g.nodes_z.iter().zip(&g.weights_w) {
                let fw = f((0.5 * (1.0 + z)).sqrt()) * 0.5 * w;
                for (c, p) in coeffs.iter_mut().zip(kind.eval_all(n_quad, z)) {
                    *c += fw * p;
                }
            }
        }
        ExpansionKind::Chebyshev => {
            // Gauss-Chebyshev nodes; p_n(cos θ) = √2 cos(nθ) evaluated directly
            let w = 1.0 / n_quad as f64;
            for j in 0..n_quad {
                let theta = PI * (j as f64 + 0.5) / n_quad as f64;
                let z = theta.cos();
                let fw = f((0.5 * (1.0 + z)).max(0.0).sqrt()) * w;
                coeffs[0] += fw;
                for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
                    *c += fw * std::f64::consts::SQRT_2 * (n as f64 * theta).cos();
                }
            }
        }
    }
    let peak = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    if peak < 1e-300 {
        return CoeffExpansion::new(kind, vec![0.0]);
    }
    let last = coeffs
        .iter()
        .rposition(|c| c.abs() > tol * peak)
        .unwrap_or(0);
    coeffs.truncate(last + 1);
    CoeffExpansion::new(kind, coeffs)
}

/// `F(Z)` on `src` by Clenshaw's recurrence.
pub fn clenshaw_matrix(exp: &CoeffExpansion, src: BasisId, n: usize) -> Result<BandedMatrix> {
    let z = z_matrix(src, n);
    let id = BandedMatrix::identity(n, src);
    let kind = exp.kind;
    let mut k1 = BandedMatrix::zeros(n, n, src, src);
    let mut k2 = BandedMatrix::zeros(n, n, src, src);
    for (j, &fj) in exp.coeffs.iter().enumerate().rev() {
        let b1 = kind.b(j + 1);
        let b2 = kind.b(j + 2);
        // K_j = F_j I + (Z - A_j) K_{j+1} / B_{j+1} - (B_{j+1}/B_{j+2}) K_{j+2}
        let shifted = z.axpby(1.0, &id, -kind.a(j))?;
        let mut next = id.scale(fj);
        if j + 1 < exp.coeffs.len() {
            next = next.axpby(1.0, &shifted.product(&k1)?, 1.0 / b1)?;
        }
        if j + 2 < exp.coeffs.len() {
            next = next.axpby(1.0, &k2, -b1 / b2)?;
        }
        k2 = k1;
        k1 = next;
    }
    Ok(k1.prune())
}
