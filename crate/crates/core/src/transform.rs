//! Grid ↔ coefficient transforms on Gauss-Legendre radii, and the Fourier
//! bookkeeping that assembles full-disk fields.
//!
//! With `N_r` radial nodes the forward transform in `(k, m)` is exact for
//! degrees up to `N_{k,m} = N_r - 1 - ⌊(k+m)/2⌋`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{q_eval_all, BasisId};
use crate::error::{DiskError, Result};
use crate::jacobi::{gauss_legendre, QuadGrid};
use crate::scalar::Scalar;
use crate::sparseops::format_sig17;

/// Coefficient column in one radial space.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialCoeffs<T = f64> {
    pub basis: BasisId,
    pub values: Vec<T>,
}

impl<T: Scalar> RadialCoeffs<T> {
    pub fn new(basis: BasisId, values: Vec<T>) -> Self {
        Self { basis, values }
    }

    pub fn zeros(basis: BasisId, len: usize) -> Self {
        Self {
            basis,
            values: vec![T::zero(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of the represented function at radius `r`.
    pub fn eval(&self, r: f64) -> Result<T> {
        if self.values.is_empty() {
            return Ok(T::zero());
        }
        let q = q_eval_all(self.basis, self.values.len() - 1, r)?;
        let mut acc = T::zero();
        for (&c, qn) in self.values.iter().zip(q) {
            acc += c * qn;
        }
        Ok(acc)
    }
}

/// Largest exactly transformable degree `N_{k,m}`.
pub fn n_max(basis: BasisId, n_r: usize) -> Result<usize> {
    let shift = ((basis.k + basis.m) / 2) as usize;
    if n_r <= shift {
        return Err(DiskError::GridTooSmall {
            basis,
            n_r,
            min: shift + 1,
        });
    }
    Ok(n_r - 1 - shift)
}

/// `(1 - r_i²)^k w_i` for each node.
pub fn quadrature_weight_factor(k: u32, grid: &QuadGrid) -> Vec<f64> {
    grid.radii_r
        .iter()
        .zip(&grid.weights_w)
        .map(|(&r, &w)| (1.0 - r * r).powi(k as i32) * w)
        .collect()
}

/// Exact number of coefficients over `|m| ≤ N_θ/2` with `N_r` radial nodes.
pub fn total_modes(n_r: usize, n_theta: usize) -> usize {
    let m_top = (n_theta / 2) as i64;
    (-m_top..=m_top)
        .map(|m| n_max(BasisId::signed(0, m), n_r).map_or(0, |n| n + 1))
        .sum()
}

/// Precomputed basis values and weights for one `(k, m, N_r)`.
#[derive(Debug)]
pub struct TransformPlan {
    pub basis: BasisId,
    pub grid: Arc<QuadGrid>,
    /// `values[i][n] = Q_n(r_i)`.
    values: Vec<Vec<f64>>,
    /// `(1 - r_i²)^k w_i / 4`; the `1/4` converts `dz` to `r dr`.
    weights: Vec<f64>,
}

impl TransformPlan {
    pub fn new(basis: BasisId, n_r: usize) -> Result<Self> {
        let top = n_max(basis, n_r)?;
        let grid = grid_for(n_r)?;
        let values = grid
            .radii_r
            .iter()
            .map(|&r| q_eval_all(basis, top, r))
            .collect::<Result<_>>()?;
        let weights = quadrature_weight_factor(basis.k, &grid)
            .into_iter()
            .map(|w| 0.25 * w)
            .collect();
        Ok(Self {
            basis,
            grid,
            values,
            weights,
        })
    }

    pub fn n_r(&self) -> usize {
        self.grid.len()
    }

    pub fn n_coeffs(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn forward<T: Scalar>(&self, samples: &[T]) -> Result<Vec<T>> {
        if samples.len() != self.n_r() {
            return Err(DiskError::Dimension {
                expected: self.n_r(),
                found: samples.len(),
            });
        }
        let mut out = vec![T::zero(); self.n_coeffs()];
        for ((q, &w), &f) in self.values.iter().zip(&self.weights).zip(samples) {
            let fw = f * w;
            for (o, &qn) in out.iter_mut().zip(q) {
                *o += fw * qn;
            }
        }
        Ok(out)
    }

    pub fn backward<T: Scalar>(&self, coeffs: &[T]) -> Result<Vec<T>> {
        if coeffs.len() > self.n_coeffs() {
            return Err(DiskError::Dimension {
                expected: self.n_coeffs(),
                found: coeffs.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .map(|q| {
                let mut acc = T::zero();
                for (&c, &qn) in coeffs.iter().zip(q) {
                    acc += c * qn;
                }
                acc
            })
            .collect())
    }
}

type GridCache = RwLock<HashMap<usize, Arc<QuadGrid>>>;
type PlanCache = RwLock<HashMap<(BasisId, usize), Arc<TransformPlan>>>;

/// Shared Gauss-Legendre grid of size `n_r`.
pub fn grid_for(n_r: usize) -> Result<Arc<QuadGrid>> {
    static GRIDS: OnceLock<GridCache> = OnceLock::new();
    let cache = GRIDS.get_or_init(Default::default);
    if let Some(g) = cache.read().expect("grid cache poisoned").get(&n_r) {
        return Ok(Arc::clone(g));
    }
    let g = Arc::new(gauss_legendre(n_r)?);
    cache
        .write()
        .expect("grid cache poisoned")
        .insert(n_r, Arc::clone(&g));
    Ok(g)
}

/// Cached [`TransformPlan`].
pub fn plan(basis: BasisId, n_r: usize) -> Result<Arc<TransformPlan>> {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let cache = PLANS.get_or_init(Default::default);
    if let Some(p) = cache
        .read()
        .expect("plan cache poisoned")
        .get(&(basis, n_r))
    {
        return Ok(Arc::clone(p));
    }
    let p = Arc::new(TransformPlan::new(basis, n_r)?);
    cache
        .write()
        .expect("plan cache poisoned")
        .insert((basis, n_r), Arc::clone(&p));
    Ok(p)
}

/// Coefficients `0..=n_max` of grid samples.
pub fn forward<T: Scalar>(
    basis: BasisId,
    samples: &[T],
    grid: &QuadGrid,
) -> Result<RadialCoeffs<T>> {
    let p = plan(basis, grid.len())?;
    Ok(RadialCoeffs::new(basis, p.forward(samples)?))
}

/// Synthesizes `Σ_n c_n Q_n(r_i)` on the grid nodes. Columns longer than
/// `n_max + 1` are accepted and evaluated directly.
pub fn backward<T: Scalar>(coeffs: &RadialCoeffs<T>, grid: &QuadGrid) -> Result<Vec<T>> {
    let p = plan(coeffs.basis, grid.len())?;
    if coeffs.len() <= p.n_coeffs() {
        return p.backward(&coeffs.values);
    }
    grid.radii_r.iter().map(|&r| coeffs.eval(r)).collect()
}

/// Equispaced angles `θ_j = 2πj / N_θ`.
pub fn theta_grid(n_theta: usize) -> Vec<f64> {
    (0..n_theta)
        .map(|j| 2.0 * PI * j as f64 / n_theta as f64)
        .collect()
}

/// Fourier coefficients `c_m = N_θ⁻¹ Σ_j f(θ_j) e^{-imθ_j}` for `|m| ≤ m_max`.
pub fn fourier_analyze(samples: &[Complex64], m_max: usize) -> BTreeMap<i64, Complex64> {
    let n = samples.len();
    let thetas = theta_grid(n);
    let mut out = BTreeMap::new();
    for m in -(m_max as i64)..=(m_max as i64) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&f, &t) in samples.iter().zip(&thetas) {
            acc += f * Complex64::from_polar(1.0, -(m as f64) * t);
        }
        out.insert(m, acc / n as f64);
    }
    out
}

/// `Σ_m c_m e^{imθ}`.
pub fn fourier_synthesize(coeffs: &BTreeMap<i64, Complex64>, theta: f64) -> Complex64 {
    coeffs
        .iter()
        .map(|(&m, &c)| c * Complex64::from_polar(1.0, m as f64 * theta))
        .sum()
}

/// A field on the disk: per Fourier index `m` and spin weight `μ̄`, a radial
/// column in `(k, |m + μ̄|)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiskField {
    pub rank: u32,
    pub components: BTreeMap<(i64, i32), RadialCoeffs<Complex64>>,
}

impl DiskField {
    pub fn scalar() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, m: i64, spin: i32, coeffs: RadialCoeffs<Complex64>) {
        self.components.insert((m, spin), coeffs);
    }

    pub fn get(&self, m: i64, spin: i32) -> Option<&RadialCoeffs<Complex64>> {
        self.components.get(&(m, spin))
    }

    pub fn m_max(&self) -> u64 {
        self.components
            .keys()
            .map(|(m, _)| m.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn total_coeffs(&self) -> usize {
        self.components.values().map(RadialCoeffs::len).sum()
    }

    /// Value of the spin component at `(r, θ)`.
    pub fn eval(&self, spin: i32, r: f64, theta: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((m, s), c) in &self.components {
            if *s == spin {
                acc += c.eval(r)? * Complex64::from_polar(1.0, *m as f64 * theta);
            }
        }
        Ok(acc)
    }

    /// Conjugate-symmetric completion: adds `-m` entries as conjugates of `+m`
    /// for a real scalar field given only on `m ≥ 0`.
    pub fn with_reality(mut self) -> Self {
        let extra: Vec<_> = self
            .components
            .iter()
            .filter(|((m, s), _)| *m > 0 && *s == 0 && !self.components.contains_key(&(-*m, 0)))
            .map(|((m, _), c)| {
                let conj = c.values.iter().map(|v| v.conj()).collect();
                ((-*m, 0), RadialCoeffs::new(c.basis, conj))
            })
            .collect();
        self.components.extend(extra);
        self
    }

    /// CSV with header `m,n,real,imag`.
    pub fn coeffs_csv(&self, spin: i32) -> String {
        let mut s = String::from("m,n,real,imag\n");
        for ((m, sp), c) in &self.components {
            if *sp != spin {
                continue;
            }
            for (n, v) in c.values.iter().enumerate() {
                let _ = writeln!(s, "{m},{n},{},{}", format_sig17(v.re), format_sig17(v.im));
            }
        }
        s
    }
}

/// CSV with header `r,theta,re,im` for samples on a tensor grid.
pub fn grid_csv(radii: &[f64], thetas: &[f64], values: &[Vec<Complex64>]) -> String {
    let mut s = String::from("r,theta,re,im\n");
    for (r, row) in radii.iter().zip(values) {
        for (t, v) in thetas.iter().zip(row) {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                format_sig17(*r),
                format_sig17(*t),
                format_sig17(v.re),
                format_sig17(v.im)
            );
        }
    }
    s
}

/// Round trip and sharpness of the transform on one `(k, m)`.
#[derive(Debug, Clone, Serialize)]
pub struct TransformCheck {
    pub k: u32,
    pub m: u32,
    pub n_r: usize,
    /// `max |forward(backward(c)) − c|` for random `c` of length `N_{k,m}+1`.
    pub round_trip: f64,
    /// Largest departure of the discrete Gram column of `Q_{N_{k,m}+1}` from
    /// the unit vector; nonzero means one degree more is not transformable.
    pub leak: f64,
    pub tolerance: f64,
}

impl TransformCheck {
    /// Exact up to `N_{k,m}` and visibly inexact one degree beyond.
    pub fn passed(&self) -> bool {
        self.round_trip <= self.tolerance && self.leak > 1e-6
    }
}

/// Runs [`TransformCheck`] for `k ≤ k_max`, `m ≤ m_max` on `n_r` nodes.
pub fn check_transforms(
    k_max: u32,
    m_max: u32,
    n_r: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<TransformCheck>> {
    let g = gauss_legendre(n_r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for k in 0..=k_max {
        let w = quadrature_weight_factor(k, &g);
        for m in 0..=m_max {
            let b = BasisId::new(k, m);
            let top = n_max(b, n_r)?;
            let coeffs: Vec<f64> = (0..=top).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let back = forward(b, &backward(&RadialCoeffs::new(b, coeffs.clone()), &g)?, &g)?;
            let round_trip = back
                .values
                .iter()
                .zip(&coeffs)
                .map(|(a, c)| (a - c).abs())
                .fold(0.0, f64::max);
            let q = g
                .radii_r
                .iter()
                .map(|&r| q_eval_all(b, top + 1, r))
                .collect::<Result<Vec<_>>>()?;
            let mut leak: f64 = 0.0;
            for n in 0..=top + 1 {
                let gram: f64 = q
                    .iter()
                    .zip(&w)
                    .map(|(qi, wi)| 0.25 * wi * qi[n] * qi[top + 1])
                    .sum();
                let e = if n == top + 1 { 1.0 } else { 0.0 };
                leak = leak.max((gram - e).abs());
            }
            out.push(TransformCheck {
                k,
                m,
                n_r,
                round_trip,
                leak,
                tolerance: tol,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::q_eval;
    use proptest::prelude::*;

    #[test]
    fn n_max_examples() {
        assert_eq!(n_max(BasisId::new(0, 0), 10).unwrap(), 9);
        assert_eq!(n_max(BasisId::new(0, 1), 10).unwrap(), 9);
        assert_eq!(n_max(BasisId::new(2, 3), 10).unwrap(), 7);
        match n_max(BasisId::new(0, 20), 10) {
            Err(DiskError::GridTooSmall { min, .. }) => assert_eq!(min, 11),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn total_modes_examples() {
        assert_eq!(total_modes(10, 2), 30);
        assert_eq!(total_modes(1, 0), 1);
        let exact = total_modes(64, 256) as f64;
        let estimate = ((64 - 256 / 8) * 256) as f64;
        assert!(
            (exact - estimate).abs() / estimate < 0.05,
            "{exact} {estimate}"
        );
    }

    #[test]
    fn weight_factor() {
        let g = gauss_legendre(2).unwrap();
        assert_eq!(quadrature_weight_factor(0, &g), g.weights_w);
        let w1 = quadrature_weight_factor(1, &g);
        for ((w, r), w0) in w1.iter().zip(&g.radii_r).zip(&g.weights_w) {
            assert!((w - w0 * (1.0 - r * r)).abs() < 1e-16);
        }
        let g = gauss_legendre(17).unwrap();
        for k in 0..=10 {
            assert!(quadrature_weight_factor(k, &g).iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn forward_examples() {
        let g = gauss_legendre(12).unwrap();
        let b = BasisId::new(0, 2);
        let samples: Vec<f64> = g
            .radii_r
            .iter()
            .map(|&r| q_eval(b, 3, r).unwrap())
            .collect();
        let c = forward(b, &samples, &g).unwrap();
        for (n, v) in c.values.iter().enumerate() {
            let e = if n == 3 { 1.0 } else { 0.0 };
            assert!((v - e).abs() < 1e-13);
        }
        let zero = forward(b, &[0.0; 12], &g).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
        // r² = (1+z)/2; Q_0 = √2, Q_1 = √6 z at (0,0)
        let b0 = BasisId::new(0, 0);
        let r2: Vec<f64> = g.radii_r.iter().map(|r| r * r).collect();
        let c = forward(b0, &r2, &g).unwrap();
        assert!((c.values[0] - 0.5 / 2f64.sqrt()).abs() < 1e-15);
        assert!((c.values[1] - 0.5 / 6f64.sqrt()).abs() < 1e-15);
        assert!(c.values[2..].iter().all(|v| v.abs() < 1e-15));
        assert!(forward(b0, &[1.0; 3], &g).is_err());
    }

    #[test]
    fn backward_examples() {
        let g = gauss_legendre(9).unwrap();
        let mut e0 = RadialCoeffs::zeros(BasisId::new(0, 0), 9);
        e0.values[0] = 1.0;
        for v in backward(&e0, &g).unwrap() {
            assert!((v - 2f64.sqrt()).abs() < 1e-15);
        }
        let z = RadialCoeffs::<f64>::zeros(BasisId::new(1, 3), 4);
        assert!(backward(&z, &g).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn round_trip_and_sharpness() {
        let checks = check_transforms(3, 20, 32, 11, 1e-13).unwrap();
        assert_eq!(checks.len(), 4 * 21);
        for c in &checks {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn fourier_round_trip() {
        let n = 16;
        let th = theta_grid(n);
        let samples: Vec<Complex64> = th
            .iter()
            .map(|&t| Complex64::new((3.0 * t).cos(), 0.0))
            .collect();
        let c = fourier_analyze(&samples, 5);
        assert!((c[&3] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((c[&-3] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(c[&1].norm() < 1e-15);
        for (&t, &f) in th.iter().zip(&samples) {
            assert!((fourier_synthesize(&c, t) - f).norm() < 1e-14);
        }
    }

    #[test]
    fn disk_field_csv_and_reality() {
        let mut f = DiskField::scalar();
        f.insert(
            2,
            0,
            RadialCoeffs::new(BasisId::new(0, 2), vec![Complex64::new(1.0, 2.0)]),
        );
        let f = f.with_reality();
        assert_eq!(f.get(-2, 0).unwrap().values[0], Complex64::new(1.0, -2.0));
        let v = f.eval(0, 0.5, 0.3).unwrap();
        assert!(v.im.abs() < 1e-15);
        let csv = f.coeffs_csv(0);
        assert!(csv.starts_with("m,n,real,imag\n-2,0,"));
        assert_eq!(f.total_coeffs(), 2);
    }

    proptest! {
        #[test]
        fn parseval(k in 0u32..4, m in 0u32..12, seed in proptest::collection::vec(-1.0f64..1.0, 24)) {
            let n_r = 24;
            let g = gauss_legendre(n_r).unwrap();
            let b = BasisId::new(k, m);
            let top = n_max(b, n_r).unwrap();
            let c = RadialCoeffs::new(b, seed[..=top].to_vec());
            let vals = backward(&c, &g).unwrap();
            let w = quadrature_weight_factor(k, &g);
            let integral: f64 = vals.iter().zip(&w).map(|(v, w)| 0.25 * w * v * v).sum();
            let energy: f64 = c.values.iter().map(|v| v * v).sum();
            prop_assert!((integral - energy).abs() <= 1e-12 * energy.max(1e-300));
        }
    }
}
