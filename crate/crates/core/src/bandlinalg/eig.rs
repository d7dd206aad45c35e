//! Dense generalized eigensolution of assembled block pencils.

use std::cmp::Ordering;
use std::fmt::Write as _;

use lax::eig_generalized::EigGeneralizedWork;
use lax::layout::MatrixLayout;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Factorize, ReciprocalConditionNum, Solve};
use num_complex::Complex64;

use crate::bandlinalg::block::BlockSystem;
use crate::error::{DiskError, Result};
use crate::sparseops::format_sig17;

/// Eigenvalues with magnitude above this are treated as infinite.
pub const INFINITE_THRESHOLD: f64 = 1e10;

/// Options for [`generalized_eig`].
#[derive(Debug, Clone, Copy)]
pub struct EigOptions {
    /// Compute eigenvectors and per-pair residuals.
    pub vectors: bool,
    pub max_magnitude: f64,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            vectors: true,
            max_magnitude: INFINITE_THRESHOLD,
        }
    }
}

/// Finite spectrum of `𝓛 x = λ 𝓡 x`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub eigenvalues: Vec<Complex64>,
    /// `‖𝓛x − λ𝓡x‖ / ‖𝓛x‖`; `NaN` when vectors were not computed.
    pub residuals: Vec<f64>,
    /// Per eigenvalue, one coefficient column per field; empty without vectors.
    pub vectors: Vec<Vec<Vec<Complex64>>>,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .copied()
            .filter(|r| !r.is_nan())
            .fold(0.0, f64::max)
    }

    /// CSV with header `index,re,im,residual`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,re,im,residual\n");
        for (i, (l, r)) in self.eigenvalues.iter().zip(&self.residuals).enumerate() {
            let _ = writeln!(
                s,
                "{i},{},{},{}",
                format_sig17(l.re),
                format_sig17(l.im),
                format_sig17(*r)
            );
        }
        s
    }
}

/// Ascending real part.
pub fn by_real_ascending(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Descending real part, i.e. least stable first.
pub fn by_real_descending(a: &Complex64, b: &Complex64) -> Ordering {
    by_real_ascending(b, a)
}

fn column_major_c(a: &Array2<Complex64>) -> Vec<Complex64> {
    a.t().iter().copied().collect()
}

fn column_major_r(a: &Array2<Complex64>) -> Vec<f64> {
    a.t().iter().map(|z| z.re).collect()
}

fn failure(l: &Array2<Complex64>, reason: String) -> DiskError {
    let condition = l.rcond().map(|r| 1.0 / r).unwrap_or(f64::INFINITY);
    DiskError::EigenFailure {
        size: l.nrows(),
        condition,
        reason,
    }
}

struct RawEig {
    alpha: Vec<Complex64>,
    beta: Vec<Complex64>,
    vr: Option<Vec<Complex64>>,
}

fn raw_eig(l: &Array2<Complex64>, r: &Array2<Complex64>, vectors: bool) -> Result<RawEig> {
    let n = l.nrows();
    let layout = MatrixLayout::F {
        col: n as i32,
        lda: n as i32,
    };
    let real = l.iter().chain(r.iter()).all(|z| z.im == 0.0);
    if real {
        let (mut a, mut b) = (column_major_r(l), column_major_r(r));
        let work = EigGeneralizedWork::<f64>::new(vectors, layout)
            .map_err(|e| failure(l, e.to_string()))?;
        let out = work
            .eval(&mut a, &mut b)
            .map_err(|e| failure(l, e.to_string()))?;
        Ok(RawEig {
            alpha: out.alpha,
            beta: out.beta,
            vr: out.vr,
        })
    } else {
        let (mut a, mut b) = (column_major_c(l), column_major_c(r));
        let work = EigGeneralizedWork::<Complex64>::new(vectors, layout)
            .map_err(|e| failure(l, e.to_string()))?;
        let out = work
            .eval(&mut a, &mut b)
            .map_err(|e| failure(l, e.to_string()))?;
        Ok(RawEig {
            alpha: out.alpha,
            beta: out.beta,
            vr: out.vr,
        })
    }
}

/// `‖𝓛x − λ𝓡x‖ / ‖𝓛x‖`.
pub fn pair_residual(
    l: &Array2<Complex64>,
    r: &Array2<Complex64>,
    lambda: Complex64,
    x: &[Complex64],
) -> f64 {
    let x = Array1::from(x.to_vec());
    let lx = l.dot(&x);
    let rx = r.dot(&x);
    let num = (&lx - &rx.mapv(|v| v * lambda))
        .iter()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den = lx.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    num / den
}

/// Full finite spectrum of an assembled block pencil, sorted by `order`.
pub fn generalized_eig<F>(sys: &BlockSystem, opts: EigOptions, order: F) -> Result<EigenResult>
where
    F: Fn(&Complex64, &Complex64) -> Ordering,
{
    if !sys.boundary_rows().is_empty() {
        return Err(DiskError::Placement(
            "boundary rows must be inserted before solving".into(),
        ));
    }
    let n = sys.total_rows();
    if n != sys.total_cols() {
        return Err(DiskError::Dimension {
            expected: sys.total_cols(),
            found: n,
        });
    }
    let l = sys.dense_lhs();
    let r = sys.dense_rhs();
    let raw = raw_eig(&l, &r, opts.vectors)?;

    let mut keep: Vec<(usize, Complex64)> = Vec::new();
    for (i, (a, b)) in raw.alpha.iter().zip(&raw.beta).enumerate() {
        if b.norm() <= f64::MIN_POSITIVE {
            continue;
        }
        let lam = a / b;
        if lam.is_finite() && lam.norm() <= opts.max_magnitude {
            keep.push((i, lam));
        }
    }
    keep.sort_by(|x, y| order(&x.1, &y.1));

    let mut out = EigenResult {
        eigenvalues: keep.iter().map(|p| p.1).collect(),
        residuals: vec![f64::NAN; keep.len()],
        vectors: Vec::new(),
    };
    if let Some(vr) = raw.vr {
        for (slot, &(i, lam)) in keep.iter().enumerate() {
            let x = &vr[i * n..(i + 1) * n];
            out.residuals[slot] = pair_residual(&l, &r, lam, x);
            out.vectors.push(sys.unpack(x)?);
        }
    }
    Ok(out)
}

/// A single eigenpair polished by shifted inverse iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedMode {
    pub eigenvalue: Complex64,
    pub residual: f64,
    pub fields: Vec<Vec<Complex64>>,
}

/// Refines an eigenvalue estimate and computes its eigenvector by inverse
/// iteration with `(𝓛 − σ𝓡)`.
pub fn refine_mode(sys: &BlockSystem, sigma: Complex64, iterations: usize) -> Result<RefinedMode> {
    let l = sys.dense_lhs();
    let r = sys.dense_rhs();
    let n = l.nrows();
    let shifted = &l - &r.mapv(|v| v * sigma);
    let lu = shifted
        .factorize()
        .map_err(|e| failure(&l, e.to_string()))?;
    let mut x = Array1::from_elem(n, Complex64::new(1.0, 0.0));
    let mut lam = sigma;
    for _ in 0..iterations.max(1) {
        let rhs = r.dot(&x);
        let y = lu.solve(&rhs).map_err(|e| failure(&l, e.to_string()))?;
        let norm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(failure(&l, "inverse iteration collapsed".into()));
        }
        x = y.mapv(|v| v / norm);
        let lx = l.dot(&x);
        let rx = r.dot(&x);
        let den: Complex64 = rx.iter().map(|v| v.norm_sqr()).sum::<f64>().into();
        lam = rx
            .iter()
            .zip(&lx)
            .map(|(p, q)| p.conj() * q)
            .sum::<Complex64>()
            / den;
    }
    let xs = x.to_vec();
    Ok(RefinedMode {
        eigenvalue: lam,
        residual: pair_residual(&l, &r, lam, &xs),
        fields: sys.unpack(&xs)?,
    })
}
