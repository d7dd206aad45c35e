//! Vector and tensor calculus in the spinor basis `e_± = (e_r ∓ i e_θ)/√2`.
//!
//! A component with spin weight `μ̄` of a field with Fourier index `m` carries
//! the signed index `M = m + μ̄` and lives in the radial space `(k, |M|)`.
//! Covariant derivatives act on such a component as `D^σ` at signed index
//! `M` (see [`d_signed`]).

use num_complex::Complex64;

use crate::basis::BasisId;
use crate::error::{DiskError, Result};
use crate::jacobi::QuadGrid;
use crate::sparseops::{convert, d_signed, BandedMatrix};
use crate::transform::{backward, RadialCoeffs};

/// A rank-1 field at one Fourier index: `v = v⁺ e₊ + v⁻ e₋` times `e^{imθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinVector {
    pub m: i64,
    pub k: u32,
    pub plus: RadialCoeffs<Complex64>,
    pub minus: RadialCoeffs<Complex64>,
}

impl SpinVector {
    pub fn new(m: i64, k: u32, plus: Vec<Complex64>, minus: Vec<Complex64>) -> Self {
        Self {
            m,
            k,
            plus: RadialCoeffs::new(BasisId::signed(k, m + 1), plus),
            minus: RadialCoeffs::new(BasisId::signed(k, m - 1), minus),
        }
    }

    pub fn zeros(m: i64, k: u32, n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self::new(m, k, z.clone(), z)
    }

    fn len(&self) -> usize {
        self.plus.len()
    }
}

fn apply(op: &BandedMatrix, x: &[Complex64]) -> Result<Vec<Complex64>> {
    op.matvec(x)
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(DiskError::Dimension {
            expected: a,
            found: b,
        })
    }
}

/// `∇f` for a scalar column at Fourier index `m`.
pub fn gradient_scalar(f: &RadialCoeffs<Complex64>, m: i64) -> Result<SpinVector> {
    let n = f.len();
    let k = f.basis.k;
    if f.basis != BasisId::signed(k, m) {
        return Err(DiskError::Composition {
            expected: BasisId::signed(k, m),
            found: f.basis,
        });
    }
    let plus = apply(&d_signed(1, k, m, n), &f.values)?;
    let minus = apply(&d_signed(-1, k, m, n), &f.values)?;
    Ok(SpinVector::new(m, k + 1, plus, minus))
}

/// `∇² : (0,|m|) → (2,|m|)` as `2 D⁻ D⁺`.
pub fn laplacian_scalar(m: i64, n: usize) -> BandedMatrix {
    laplacian_component(0, m, n)
}

/// Laplacian acting on a single spin component with signed index `m_signed`
/// at level `k`; `(k, |M|) → (k+2, |M|)`.
pub fn laplacian_component(k: u32, m_signed: i64, n: usize) -> BandedMatrix {
    let up = d_signed(1, k, m_signed, n);
    let down = d_signed(-1, k + 1, m_signed + 1, n);
    down.product(&up)
        .expect("signed ladder composes")
        .scale(2.0)
}

/// `∇·v = ∇₋v⁺ + ∇₊v⁻`, landing in `(k+1, |m|)`.
pub fn divergence(v: &SpinVector) -> Result<RadialCoeffs<Complex64>> {
    let n = v.len();
    check_len(n, v.minus.len())?;
    let a = apply(&d_signed(-1, v.k, v.m + 1, n), &v.plus.values)?;
    let b = apply(&d_signed(1, v.k, v.m - 1, n), &v.minus.values)?;
    Ok(RadialCoeffs::new(
        BasisId::signed(v.k + 1, v.m),
        a.into_iter().zip(b).map(|(x, y)| x + y).collect(),
    ))
}

/// `ω₃ = ∇·(e₃ × v) = i(∇₋v⁺ - ∇₊v⁻)`, converted once more to `(k+2, |m|)`.
///
/// With this orientation a counter-clockwise solid-body rotation `v_θ = r`
/// gives `ω₃ = -2`.
pub fn curl_z(v: &SpinVector) -> Result<RadialCoeffs<Complex64>> {
    let n = v.len();
    check_len(n, v.minus.len())?;
    let a = apply(&d_signed(-1, v.k, v.m + 1, n), &v.plus.values)?;
    let b = apply(&d_signed(1, v.k, v.m - 1, n), &v.minus.values)?;
    let i = Complex64::new(0.0, 1.0);
    let w: Vec<Complex64> = a.into_iter().zip(b).map(|(x, y)| i * (x - y)).collect();
    let mid = BasisId::signed(v.k + 1, v.m);
    let c = convert(mid, n);
    Ok(RadialCoeffs::new(c.codomain(), apply(&c, &w)?))
}

/// Grid values of `(v_r, v_θ)` from spin components.
pub fn spin_to_polar(v: &SpinVector, grid: &QuadGrid) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let p = backward(&v.plus, grid)?;
    let q = backward(&v.minus, grid)?;
    Ok(polar_from_spin_values(&p, &q))
}

/// Pointwise `v_r = (v⁺+v⁻)/√2`, `v_θ = i(v⁻-v⁺)/√2`.
pub fn polar_from_spin_values(
    plus: &[Complex64],
    minus: &[Complex64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    plus.iter()
        .zip(minus)
        .map(|(&p, &q)| ((p + q) * s, i * (q - p) * s))
        .unzip()
}

/// Pointwise `v± = (v_r ± i v_θ)/√2`.
pub fn spin_from_polar_values(
    vr: &[Complex64],
    vt: &[Complex64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    vr.iter()
        .zip(vt)
        .map(|(&r, &t)| ((r + i * t) * s, (r - i * t) * s))
        .unzip()
}

/// A rank-2 field at one Fourier index; component `(μ₁, μ₂)` has spin weight
/// `μ₁ + μ₂` and lives in `(k, |m + μ₁ + μ₂|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinTensor2 {
    pub m: i64,
    pub k: u32,
    /// Indexed `[(+,+), (+,-), (-,+), (-,-)]`, the first index being the
    /// derivative direction for gradients.
    pub comps: [RadialCoeffs<Complex64>; 4],
}

impl SpinTensor2 {
    pub fn component(&self, s1: i32, s2: i32) -> &RadialCoeffs<Complex64> {
        let idx = match (s1 > 0, s2 > 0) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        &self.comps[idx]
    }
}

/// `∇v`: component `(σ, μ)` is `D^σ` applied to `v^μ` at index `m + μ`.
pub fn gradient_vector(v: &SpinVector) -> Result<SpinTensor2> {
    let n = v.len();
    let mut out = Vec::with_capacity(4);
    for sigma in [1, -1] {
        for (mu, comp) in [(1i64, &v.plus), (-1, &v.minus)] {
            let op = d_signed(sigma, v.k, v.m + mu, n);
            out.push(RadialCoeffs::new(op.codomain(), apply(&op, &comp.values)?));
        }
    }
    let comps: [RadialCoeffs<Complex64>; 4] = out.try_into().expect("four components");
    Ok(SpinTensor2 {
        m: v.m,
        k: v.k + 1,
        comps,
    })
}

/// `∇·T` contracting the first index: `∇₋T^{+μ} + ∇₊T^{-μ}`.
pub fn divergence_tensor(t: &SpinTensor2) -> Result<SpinVector> {
    let n = t.comps[0].len();
    let mut plus = vec![Complex64::new(0.0, 0.0); n];
    let mut minus = plus.clone();
    for (mu, target) in [(1i64, &mut plus), (-1, &mut minus)] {
        let a = apply(
            &d_signed(-1, t.k, t.m + 1 + mu, n),
            &t.component(1, mu as i32).values,
        )?;
        let b = apply(
            &d_signed(1, t.k, t.m - 1 + mu, n),
            &t.component(-1, mu as i32).values,
        )?;
        for ((x, y), z) in a.into_iter().zip(b).zip(target.iter_mut()) {
            *z = x + y;
        }
    }
    Ok(SpinVector::new(t.m, t.k + 1, plus, minus))
}

/// Vector Laplacian, component-wise at signed indices `m ± 1`.
pub fn vector_laplacian(v: &SpinVector) -> Result<SpinVector> {
    let n = v.len();
    let plus = apply(&laplacian_component(v.k, v.m + 1, n), &v.plus.values)?;
    let minus = apply(&laplacian_component(v.k, v.m - 1, n), &v.minus.values)?;
    Ok(SpinVector::new(v.m, v.k + 2, plus, minus))
}
