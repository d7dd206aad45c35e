//! Inertial waves in a rotating cylinder: the block pencil in
//! `Ξ = (iv⁺, iv⁻, p)`, `𝓛Ξ = −ω𝓜Ξ`, and the no-penetration wall
//! condition replacing the last row of the `v⁺` equation.

use diskspec_core::bandlinalg::{
    by_real_ascending, generalized_eig, Block, BlockSystem, BoundaryRow, EigOptions, EigenResult,
    Field,
};
use diskspec_core::basis::restriction_row;
use diskspec_core::sparseops::{convert, d_signed};
use diskspec_core::{BasisId, Result};
use num_complex::Complex64;

use crate::bessel::inertial_frequencies;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Assembled pencil for azimuthal order `m ≥ 1` and aspect ratio `alpha`.
pub fn inertial_system(m: u32, alpha: f64, n: usize) -> Result<BlockSystem> {
    let ms = m as i64;
    let bp = BasisId::signed(0, ms + 1);
    let bm = BasisId::signed(0, ms - 1);
    let bq = BasisId::new(0, m);
    let mut sys = BlockSystem::square(vec![
        Field::new("v+", bp, n),
        Field::new("v-", bm, n),
        Field::new("p", bq, n),
    ]);
    sys.set_lhs(0, 0, Block::real(convert(bp, n)))?;
    sys.set_lhs(0, 2, Block::real(d_signed(1, 0, ms, n)))?;
    sys.set_lhs(1, 1, Block::real(convert(bm, n).scale(-1.0)))?;
    sys.set_lhs(1, 2, Block::real(d_signed(-1, 0, ms, n)))?;
    sys.set_lhs(2, 2, Block::real(convert(bq, n).scale(alpha * alpha)))?;
    sys.set_rhs(0, 0, Block::real(convert(bp, n).scale(-1.0)))?;
    sys.set_rhs(1, 1, Block::real(convert(bm, n).scale(-1.0)))?;
    sys.set_rhs(2, 0, Block::real(d_signed(-1, 0, ms + 1, n).scale(-1.0)))?;
    sys.set_rhs(2, 1, Block::real(d_signed(1, 0, ms - 1, n).scale(-1.0)))?;
    sys.add_boundary_row(
        BoundaryRow::new(0, Complex64::new(0.0, 0.0))
            .with_restriction(0, &restriction_row(bp, 0, n)?, one())
            .with_restriction(1, &restriction_row(bm, 0, n)?, one()),
    );
    sys.insert_boundary_rows()
}

/// Computed spectrum with the analytic comparison.
#[derive(Debug, Clone)]
pub struct InertialRun {
    pub m: u32,
    pub alpha: f64,
    pub n: usize,
    /// Frequencies `ω` in ascending order, with pencil residuals.
    pub spectrum: EigenResult,
    /// Largest `|Im ω|` over the spectrum.
    pub max_imag: f64,
    pub max_abs: f64,
    /// Analytic frequencies with `κ ≤ kappa_resolved`, each paired with the
    /// relative error of the nearest computed frequency.
    pub resolved: Vec<(f64, f64)>,
    pub kappa_resolved: f64,
}

impl InertialRun {
    pub fn omega(&self) -> Vec<f64> {
        self.spectrum.eigenvalues.iter().map(|w| w.re).collect()
    }

    pub fn max_resolved_error(&self) -> f64 {
        self.resolved.iter().map(|p| p.1).fold(0.0, f64::max)
    }
}

/// Radial wavenumbers up to this fraction of `N` are treated as resolved.
pub const RESOLVED_FRACTION: f64 = 0.5;

pub fn run_inertial(m: u32, alpha: f64, n: usize) -> Result<InertialRun> {
    let sys = inertial_system(m, alpha, n)?;
    let opts = EigOptions {
        vectors: false,
        ..EigOptions::default()
    };
    let spectrum = generalized_eig(&sys, opts, by_real_ascending)?;
    let omega: Vec<f64> = spectrum.eigenvalues.iter().map(|w| w.re).collect();
    let max_imag = spectrum
        .eigenvalues
        .iter()
        .map(|w| w.im.abs())
        .fold(0.0, f64::max);
    let max_abs = spectrum
        .eigenvalues
        .iter()
        .map(|w| w.norm())
        .fold(0.0, f64::max);
    let kappa_resolved = RESOLVED_FRACTION * n as f64;
    let resolved = inertial_frequencies(m as usize, alpha, kappa_resolved)
        .into_iter()
        .map(|exact| {
            let nearest = omega
                .iter()
                .map(|w| (w - exact).abs())
                .fold(f64::INFINITY, f64::min);
            (exact, nearest / exact.abs())
        })
        .collect();
    Ok(InertialRun {
        m,
        alpha,
        n,
        spectrum,
        max_imag,
        max_abs,
        resolved,
        kappa_resolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_problem_is_real_and_bounded() {
        let run = run_inertial(1, 1.0, 40).unwrap();
        assert!(run.max_imag < 1e-8);
        assert!(run.max_abs < 1.0);
        assert!(run.max_resolved_error() < 1e-8, "{:?}", run.resolved);
    }
}
