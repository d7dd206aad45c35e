//! Jacobi polynomials `P_n^{(a,b)}(z)` and Gauss-Legendre quadrature.
//!
//! Evaluation uses the classical three-term recurrence (DLMF 18.9.2). Norms
//! for integer exponents are formed as products of ratios so that they stay
//! finite well past the point where `Γ(n + a + b + 1)` overflows.

use crate::error::{DiskError, Result};

/// Exponents of the Jacobi weight `(1 - z)^a (1 + z)^b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    a: f64,
    b: f64,
}

impl JacobiParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0 && b > -1.0) || !a.is_finite() || !b.is_finite() {
            return Err(DiskError::JacobiParams { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The pair with `a` and `b` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
        }
    }
}

/// Evaluates `P_n^{(a,b)}(z)`.
pub fn jacobi_eval(n: usize, p: JacobiParams, z: f64) -> f64 {
    let (a, b) = (p.a, p.b);
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * z;
    for j in 2..=n {
        let j = j as f64;
        let s = 2.0 * j + a + b;
        let c0 = 2.0 * j * (j + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * z + a * a - b * b);
        let c2 = 2.0 * (j + a - 1.0) * (j + b - 1.0) * s;
        let next = (c1 * cur - c2 * prev) / c0;
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluates `(-1)^n P_n^{(b,a)}(z)`, which equals `P_n^{(a,b)}(-z)`.
pub fn jacobi_reflect(n: usize, p: JacobiParams, z: f64) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * jacobi_eval(n, p.swapped(), z)
}

fn integer_valued(x: f64) -> Option<u32> {
    if x >= 0.0 && x.fract() == 0.0 && x < 1.0e6 {
        Some(x as u32)
    } else {
        None
    }
}

/// The squared norm `W_n^{a,b} = ∫ P_n² (1-z)^a (1+z)^b dz`.
pub fn jacobi_norm(n: usize, p: JacobiParams) -> f64 {
    let (a, b) = (p.a, p.b);
    let nf = n as f64;
    let scale = 2f64.powf(a + b + 1.0);
    if n == 0 {
        // 2^{a+b+1} Γ(a+1) Γ(b+1) / Γ(a+b+2)
        if let Some(ai) = integer_valued(a) {
            // Γ(a+1)Γ(b+1)/Γ(a+b+2) = 1/(b+1) · Π_{j=1}^{a} j/(b+1+j)
            let mut prod = 1.0 / (b + 1.0);
            for j in 1..=ai {
                prod *= j as f64 / (b + 1.0 + j as f64);
            }
            return scale * prod;
        }
        if integer_valued(b).is_some() {
            return jacobi_norm(0, p.swapped());
        }
        let ln = libm::lgamma(a + 1.0) + libm::lgamma(b + 1.0) - libm::lgamma(a + b + 2.0);
        return scale * ln.exp();
    }
    let lead = scale / (2.0 * nf + a + b + 1.0);
    // Γ(n+a+1)/n! · Γ(n+b+1)/Γ(n+a+b+1) = Π_{j=1}^{a} (n+j)/(n+b+j) for integer a
    if let Some(ai) = integer_valued(a) {
        let mut prod = 1.0;
        for j in 1..=ai {
            let j = j as f64;
            prod *= (nf + j) / (nf + b + j);
        }
        return lead * prod;
    }
    if integer_valued(b).is_some() {
        return jacobi_norm(n, p.swapped());
    }
    let ln = libm::lgamma(nf + a + 1.0) + libm::lgamma(nf + b + 1.0)
        - libm::lgamma(nf + a + b + 1.0)
        - libm::lgamma(nf + 1.0);
    lead * ln.exp()
}

/// Gauss-Legendre nodes on `z ∈ (-1, 1)` together with the disk radii
/// `r_i = sqrt((1 + z_i)/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    pub nodes_z: Vec<f64>,
    pub radii_r: Vec<f64>,
    pub weights_w: Vec<f64>,
}

impl QuadGrid {
    pub fn len(&self) -> usize {
        self.nodes_z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes_z.is_empty()
    }
}

/// Legendre `P_n` and `P_{n-1}` at `z`.
fn legendre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = z;
    for j in 1..n {
        let j = j as f64;
        let next = ((2.0 * j + 1.0) * z * cur - j * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Builds the `n_r`-point Gauss-Legendre rule by Newton iteration from
/// Chebyshev-angle starting guesses.
pub fn gauss_legendre(n_r: usize) -> Result<QuadGrid> {
    if n_r == 0 {
        return Err(DiskError::Parameter(
            "Gauss-Legendre rule needs N_r >= 1".into(),
        ));
    }
    let n = n_r;
    let nf = n as f64;
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // i-th largest root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, x);
            dp = nf * (pm1 - x * p) / (1.0 - x * x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1e-3) {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, x);
        dp = if p.is_finite() {
            nf * (pm1 - x * p) / (1.0 - x * x)
        } else {
            dp
        };
        let wi = 2.0 / ((1.0 - x * x) * dp * dp);
        z[n - 1 - i] = x;
        w[n - 1 - i] = wi;
        z[i] = -x;
        w[i] = wi;
    }
    if n % 2 == 1 {
        z[n / 2] = 0.0;
    }
    let radii_r = z.iter().map(|&zi| (0.5 * (1.0 + zi)).sqrt()).collect();
    Ok(QuadGrid {
        nodes_z: z,
        radii_r,
        weights_w: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn binom(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
    }

    #[test]
    fn degree_zero_is_one() {
        let p = JacobiParams::new(1.5, 0.25).unwrap();
        assert_eq!(jacobi_eval(0, p, 0.3), 1.0);
        assert_eq!(jacobi_reflect(0, p, 0.3), 1.0);
    }

    #[test]
    fn boundary_value_is_binomial() {
        let p = JacobiParams::new(2.0, 7.0).unwrap();
        assert_eq!(jacobi_eval(5, p, 1.0), 21.0);
        for a in 0..5u64 {
            for b in 0..6u64 {
                let p = JacobiParams::new(a as f64, b as f64).unwrap();
                for n in 0..30u64 {
                    let expect = binom(a + n, n);
                    let got = jacobi_eval(n as usize, p, 1.0);
                    assert!((got - expect).abs() <= 1e-13 * expect, "{a} {b} {n}");
                }
            }
        }
    }

    #[test]
    fn legendre_closed_form() {
        let p = JacobiParams::new(0.0, 0.0).unwrap();
        // P_2(z) = (3z² - 1)/2
        let z: f64 = 0.5;
        let closed = (3.0 * z * z - 1.0) / 2.0;
        assert!((closed + 0.125).abs() < 1e-16);
        assert!((jacobi_eval(2, p, z) - closed).abs() < 1e-15);
    }

    #[test]
    fn reflection_examples() {
        let p = JacobiParams::new(0.0, 0.0).unwrap();
        assert!((jacobi_reflect(1, p, 0.5) + 0.5).abs() < 1e-15);
        let q = JacobiParams::new(1.0, 2.0).unwrap();
        let lhs = jacobi_eval(3, q, -0.4);
        let rhs = -jacobi_eval(3, q.swapped(), 0.4);
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(JacobiParams::new(-1.0, 0.0).is_err());
        assert!(JacobiParams::new(0.0, -1.5).is_err());
        assert!(JacobiParams::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn norm_examples() {
        let p00 = JacobiParams::new(0.0, 0.0).unwrap();
        assert!((jacobi_norm(0, p00) - 2.0).abs() < 1e-15);
        assert!((jacobi_norm(1, p00) - 2.0 / 3.0).abs() < 1e-15);
        let p10 = JacobiParams::new(1.0, 0.0).unwrap();
        assert!((jacobi_norm(0, p10) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn norm_stays_finite_for_large_degree() {
        let p = JacobiParams::new(3.0, 200.0).unwrap();
        let w = jacobi_norm(400, p);
        assert!(w.is_finite() && w > 0.0);
        // integer-ratio route against log-gamma route
        let ln =
            libm::lgamma(404.0) + libm::lgamma(601.0) - libm::lgamma(604.0) - libm::lgamma(401.0);
        let direct = 2f64.powf(204.0) / 1004.0 * ln.exp();
        assert!((w - direct).abs() <= 1e-11 * direct);
    }

    #[test]
    fn non_integer_norm_matches_quadrature() {
        // a = 0.5 with b = 0 reduces to the integer route via swapping only when b is
        // integer; check the mixed case against quadrature on (1-z)^{1/2}.
        let p = JacobiParams::new(0.0, 0.5).unwrap();
        let q = JacobiParams::new(0.5, 0.5).unwrap();
        let grid = gauss_legendre(400).unwrap();
        for n in 0..4 {
            for (params, expo) in [(p, (0.0, 0.5)), (q, (0.5, 0.5))] {
                let quad: f64 = grid
                    .nodes_z
                    .iter()
                    .zip(&grid.weights_w)
                    .map(|(&z, &w)| {
                        let v = jacobi_eval(n, params, z);
                        w * v * v * (1.0 - z).powf(expo.0) * (1.0 + z).powf(expo.1)
                    })
                    .sum();
                let exact = jacobi_norm(n, params);
                assert!((quad - exact).abs() < 1e-4 * exact, "{n} {quad} {exact}");
            }
        }
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let g1 = gauss_legendre(1).unwrap();
        assert_eq!(g1.nodes_z, vec![0.0]);
        assert!((g1.weights_w[0] - 2.0).abs() < 1e-15);
        let g2 = gauss_legendre(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((g2.nodes_z[0] + s).abs() < 1e-15);
        assert!((g2.nodes_z[1] - s).abs() < 1e-15);
        assert!((g2.weights_w[0] - 1.0).abs() < 1e-15);
        assert!((g2.weights_w[1] - 1.0).abs() < 1e-15);
        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn gauss_legendre_exactness_boundary() {
        let g = gauss_legendre(64).unwrap();
        let m: f64 = g
            .nodes_z
            .iter()
            .zip(&g.weights_w)
            .map(|(z, w)| w * z.powi(126))
            .sum();
        assert!((m - 2.0 / 127.0).abs() < 1e-14);
        let total: f64 = g.weights_w.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
        assert!(g.nodes_z.windows(2).all(|p| p[0] < p[1]));
        for (z, r) in g.nodes_z.iter().zip(&g.radii_r) {
            assert!((r * r * 2.0 - 1.0 - z).abs() < 1e-15);
        }
    }

    #[test]
    fn large_rule_is_accurate() {
        let g = gauss_legendre(2000).unwrap();
        let total: f64 = g.weights_w.iter().sum();
        assert!((total - 2.0).abs() < 1e-12);
        let m: f64 = g
            .nodes_z
            .iter()
            .zip(&g.weights_w)
            .map(|(z, w)| w * z * z)
            .sum();
        assert!((m - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn orthogonality_under_quadrature() {
        let n_r = 24;
        let g = gauss_legendre(n_r).unwrap();
        for (a, b) in [(0u32, 0u32), (1, 0), (0, 2), (2, 3), (1, 1)] {
            let p = JacobiParams::new(a as f64, b as f64).unwrap();
            // weight contributes degree a + b; exact while n + n' + a + b < 2 n_r
            let top = (2 * n_r - (a + b) as usize) / 2;
            for n in 0..top.min(n_r) {
                for np in 0..top.min(n_r) {
                    if n + np + (a + b) as usize >= 2 * n_r {
                        continue;
                    }
                    let s: f64 = g
                        .nodes_z
                        .iter()
                        .zip(&g.weights_w)
                        .map(|(&z, &w)| {
                            w * (1.0 - z).powi(a as i32)
                                * (1.0 + z).powi(b as i32)
                                * jacobi_eval(n, p, z)
                                * jacobi_eval(np, p, z)
                        })
                        .sum();
                    let expect = if n == np { jacobi_norm(n, p) } else { 0.0 };
                    assert!(
                        (s - expect).abs() <= 1e-12 * jacobi_norm(n, p).max(1.0),
                        "{a}{b} {n} {np} {s}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn reflection_identity(n in 0usize..40, a in -0.9f64..6.0, b in -0.9f64..6.0, z in -1.0f64..1.0) {
            let p = JacobiParams::new(a, b).unwrap();
            let lhs = jacobi_eval(n, p, -z);
            let rhs = jacobi_reflect(n, p, z);
            // relative to the size of the polynomial on [-1, 1]
            let scale = jacobi_eval(n, p, 1.0).abs().max(jacobi_eval(n, p, -1.0).abs()).max(1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-13 * scale);
        }

        #[test]
        fn boundary_value_non_integer(n in 0usize..30, a in -0.9f64..5.0, b in -0.9f64..5.0) {
            let p = JacobiParams::new(a, b).unwrap();
            // binom(a+n, n) = Γ(a+n+1)/(Γ(a+1) n!)
            let expect: f64 = (1..=n).fold(1.0, |acc, j| acc * (a + j as f64) / j as f64);
            let got = jacobi_eval(n, p, 1.0);
            prop_assert!((got - expect).abs() <= 1e-13 * expect.abs().max(1.0));
        }
    }
}
