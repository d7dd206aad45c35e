//! Forced Helmholtz problem `∇²f + κ²f = s` on the disk with `f = g` on the
//! wall, solved one Fourier index at a time with Galerkin-recombined banded
//! systems and doubling resolution.

use std::f64::consts::PI;
use std::time::Instant;

use diskspec_core::bandlinalg::{Block, BlockSystem, BoundaryRow, Field, Recombination};
use diskspec_core::basis::restriction_row;
use diskspec_core::sparseops::convert;
use diskspec_core::tensor::laplacian_scalar;
use diskspec_core::transform::{
    forward, fourier_analyze, grid_for, theta_grid, DiskField, RadialCoeffs,
};
use diskspec_core::{BandedMatrix, BasisId, DiskError, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Right-hand side `s(x, y)` and boundary data `g` as a function of angle.
pub struct Forcing {
    pub source: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub boundary: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Forcing {
    /// `s = exp(−(x−0.4)² − (y−0.3)²)`, `g = y cos(10x)` on `r = 1`.
    pub fn gaussian() -> Self {
        Self {
            source: Box::new(|x, y| (-(x - 0.4).powi(2) - (y - 0.3).powi(2)).exp()),
            boundary: Box::new(|t| t.sin() * (10.0 * t.cos()).cos()),
        }
    }

    /// `s = 0`, `g = 1`.
    pub fn constant_wall() -> Self {
        Self {
            source: Box::new(|_, _| 0.0),
            boundary: Box::new(|_| 1.0),
        }
    }
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmholtzParams {
    /// Signed `κ²`; negative values give the screened Poisson equation.
    pub kappa_sq: f64,
    pub tol: f64,
    /// Angular samples used to extract Fourier content.
    pub n_theta: usize,
    pub n_start: usize,
    pub n_limit: usize,
}

impl HelmholtzParams {
    pub fn new(kappa: f64, tol: f64) -> Self {
        Self {
            kappa_sq: kappa * kappa,
            tol,
            n_theta: 256,
            n_start: 32,
            n_limit: 8192,
        }
    }
}

/// Outcome at one Fourier index.
#[derive(Debug, Clone, Serialize)]
pub struct ModeReport {
    pub m: i64,
    pub n_used: usize,
    pub residual: f64,
    /// Solution peak over data scale; large values signal near-resonance.
    pub amplification: f64,
}

/// Amplification above which a mode is reported as near-resonant.
pub const RESONANCE_WARNING: f64 = 1e8;

/// Machine-readable summary of a run.
#[derive(Debug, Clone, Serialize)]
pub struct HelmholtzReport {
    pub schema_version: u32,
    pub kappa: f64,
    pub total_coeffs: usize,
    pub wall_time_s: f64,
    pub max_residual: f64,
    pub per_m: Vec<ModeReport>,
    /// Near-singular solves, one message per affected `m`.
    pub warnings: Vec<String>,
}

/// Solution plus report.
#[derive(Debug, Clone)]
pub struct HelmholtzRun {
    pub report: HelmholtzReport,
    /// Coefficients for `m ≥ 0`; negative indices follow by conjugation.
    pub solution: DiskField,
}

impl HelmholtzRun {
    pub fn eval(&self, r: f64, theta: f64) -> Result<f64> {
        let mut acc = 0.0;
        for ((m, _), c) in &self.solution.components {
            let term = c.eval(r)? * Complex64::from_polar(1.0, *m as f64 * theta);
            acc += if *m == 0 { term.re } else { 2.0 * term.re };
        }
        Ok(acc)
    }

    /// Largest `|f|` with `r < r_in` and with `r ≥ r_in`, on a polar grid.
    pub fn origin_extrema(&self, r_in: f64, n_r: usize, n_theta: usize) -> Result<(f64, f64)> {
        let thetas = theta_grid(n_theta);
        let (mut inner, mut outer) = (0.0f64, 0.0f64);
        for i in 0..=n_r {
            let r = i as f64 / n_r as f64;
            for &t in &thetas {
                let v = self.eval(r, t)?.abs();
                if r < r_in {
                    inner = inner.max(v);
                } else {
                    outer = outer.max(v);
                }
            }
        }
        Ok((inner, outer))
    }
}

/// `s_m(r) = (2π)⁻¹ ∫ s(r cos θ, r sin θ) e^{−imθ} dθ` by the trapezoid rule.
fn source_mode(forcing: &Forcing, m: i64, r: f64, n_theta: usize) -> Complex64 {
    let mut acc = ZERO;
    for j in 0..n_theta {
        let t = 2.0 * PI * j as f64 / n_theta as f64;
        acc += (forcing.source)(r * t.cos(), r * t.sin())
            * Complex64::from_polar(1.0, -(m as f64) * t);
    }
    acc / n_theta as f64
}

/// Largest `|m|` with data above `tol` relative to the largest mode, and that
/// largest amplitude, from `n_theta` samples on a few circles.
fn m_extent(forcing: &Forcing, n_theta: usize, tol: f64) -> (usize, f64) {
    let half = n_theta / 2 - 1;
    let mut amp = vec![0.0f64; half + 1];
    for r in [0.25, 0.5, 0.75, 1.0] {
        let s: Vec<Complex64> = theta_grid(n_theta)
            .iter()
            .map(|&t| Complex64::from((forcing.source)(r * t.cos(), r * t.sin())))
            .collect();
        for (m, c) in fourier_analyze(&s, half) {
            if m >= 0 {
                amp[m as usize] = amp[m as usize].max(c.norm());
            }
        }
    }
    let g: Vec<Complex64> = theta_grid(n_theta)
        .iter()
        .map(|&t| Complex64::from((forcing.boundary)(t)))
        .collect();
    for (m, c) in fourier_analyze(&g, half) {
        if m >= 0 {
            amp[m as usize] = amp[m as usize].max(c.norm());
        }
    }
    let peak = amp.iter().copied().fold(0.0, f64::max);
    (amp.iter().rposition(|a| *a > tol * peak).unwrap_or(0), peak)
}

fn operator(m: u32, n: usize, kappa_sq: f64) -> Result<(BandedMatrix, BandedMatrix)> {
    let b = BasisId::new(0, m);
    let cc = convert(BasisId::new(1, m), n).product(&convert(b, n))?;
    let l = laplacian_scalar(m as i64, n).axpby(1.0, &cc, kappa_sq)?;
    Ok((l, cc))
}

/// Coefficients and diagnostics at one `m ≥ 0`. Coefficients count as
/// negligible below `tol` times the larger of their own peak and `data_scale`.
fn solve_mode(
    forcing: &Forcing,
    m: u32,
    g_m: Complex64,
    data_scale: f64,
    p: &HelmholtzParams,
) -> Result<(RadialCoeffs<Complex64>, ModeReport)> {
    let b = BasisId::new(0, m);
    let mut n = p.n_start;
    loop {
        let grid = grid_for(n + m as usize / 2 + 1)?;
        let samples: Vec<Complex64> = grid
            .radii_r
            .iter()
            .map(|&r| source_mode(forcing, m as i64, r, p.n_theta))
            .collect();
        let s = forward(b, &samples, &grid)?.values[..n].to_vec();
        let (l, cc) = operator(m, n, p.kappa_sq)?;
        let rhs = cc.matvec(&s)?;
        let mut sys = BlockSystem::square(vec![Field::new("f", b, n)]);
        sys.set_lhs(0, 0, Block::real(l.clone()))?;
        sys.set_forcing(0, rhs.clone())?;
        sys.add_boundary_row(BoundaryRow::new(0, g_m).with_restriction(
            0,
            &restriction_row(b, 0, n)?,
            ONE,
        ));
        let f = sys
            .galerkin_recombine(&[0], Recombination::Dirichlet)?
            .insert_boundary_rows()?
            .solve()?
            .remove(0);

        let peak = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let floor = p.tol * peak.max(data_scale);
        let tail = f[n - 4..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if tail <= floor || 2 * n > p.n_limit {
            if tail > floor {
                return Err(DiskError::Parameter(format!(
                    "m = {m} unresolved at N = {n} (tail {tail:.3e} of peak {peak:.3e})"
                )));
            }
            let lf = l.matvec(&f)?;
            let scale = rhs
                .iter()
                .map(|v| v.norm())
                .fold(g_m.norm(), f64::max)
                .max(1.0);
            let pde = lf[..n - 1]
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let wall: Complex64 = restriction_row(b, 0, n)?
                .entries
                .iter()
                .zip(&f)
                .map(|(r, c)| c * r)
                .sum();
            let residual = pde.max((wall - g_m).norm()) / scale;
            let n_used = f
                .iter()
                .rposition(|v| v.norm() > floor)
                .map_or(0, |i| i + 1);
            let coeffs = RadialCoeffs::new(b, f[..n_used.max(1)].to_vec());
            let report = ModeReport {
                m: m as i64,
                n_used,
                residual,
                amplification: peak / scale,
            };
            return Ok((coeffs, report));
        }
        n *= 2;
    }
}

/// Solves every Fourier index carrying data above `tol`, in parallel.
pub fn run_helmholtz(forcing: &Forcing, p: &HelmholtzParams) -> Result<HelmholtzRun> {
    if !p.kappa_sq.is_finite() || p.tol.is_nan() || p.tol <= 0.0 {
        return Err(DiskError::Parameter(
            "kappa must be finite and tol positive".into(),
        ));
    }
    let start = Instant::now();
    let (m_top, data_scale) = m_extent(forcing, p.n_theta, p.tol);
    let g: Vec<Complex64> = theta_grid(p.n_theta)
        .iter()
        .map(|&t| Complex64::from((forcing.boundary)(t)))
        .collect();
    let g_modes = fourier_analyze(&g, m_top);
    let solved = (0..=m_top as u32)
        .into_par_iter()
        .map(|m| solve_mode(forcing, m, g_modes[&(m as i64)], data_scale, p))
        .collect::<Result<Vec<_>>>()?;

    let mut solution = DiskField::scalar();
    let mut per_m = Vec::new();
    for (coeffs, rep) in solved {
        solution.insert(rep.m, 0, coeffs);
        per_m.push(rep);
    }
    let total_coeffs = per_m
        .iter()
        .map(|r| if r.m == 0 { r.n_used } else { 2 * r.n_used })
        .sum();
    let max_residual = per_m.iter().map(|r| r.residual).fold(0.0, f64::max);
    let warnings = per_m
        .iter()
        .filter(|r| r.amplification > RESONANCE_WARNING)
        .map(|r| {
            format!(
                "m = {}: near-resonant solve, amplification {:.3e}",
                r.m, r.amplification
            )
        })
        .collect();
    Ok(HelmholtzRun {
        report: HelmholtzReport {
            schema_version: SCHEMA_VERSION,
            kappa: p.kappa_sq.abs().sqrt(),
            total_coeffs,
            wall_time_s: start.elapsed().as_secs_f64(),
            max_residual,
            per_m,
            warnings,
        },
        solution,
    })
}
