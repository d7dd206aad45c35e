//! Laplacian eigenvalues on the disk with Dirichlet walls: `∇²f = −κ²f`,
//! discretized as `2D⁻D⁺ f = −κ² CC f` with the last row replaced by `f(1) = 0`.

use diskspec_core::bandlinalg::{
    by_real_ascending, generalized_eig, Block, BlockSystem, BoundaryRow, EigOptions, EigenResult,
    Field,
};
use diskspec_core::basis::restriction_row;
use diskspec_core::sparseops::convert;
use diskspec_core::tensor::laplacian_scalar;
use diskspec_core::transform::RadialCoeffs;
use diskspec_core::{BasisId, Result};
use num_complex::Complex64;

use crate::bessel::bessel_zeros;

/// Assembled pencil for order `m` with `n` radial coefficients.
pub fn bessel_system(m: u32, n: usize) -> Result<BlockSystem> {
    let b = BasisId::new(0, m);
    let lap = laplacian_scalar(m as i64, n);
    let cc = convert(BasisId::new(1, m), n).product(&convert(b, n))?;
    let mut sys = BlockSystem::square(vec![Field::new("f", b, n)]);
    sys.set_lhs(0, 0, Block::real(lap))?;
    sys.set_rhs(0, 0, Block::real(cc.scale(-1.0)))?;
    sys.add_boundary_row(
        BoundaryRow::new(0, Complex64::new(0.0, 0.0)).with_restriction(
            0,
            &restriction_row(b, 0, n)?,
            Complex64::new(1.0, 0.0),
        ),
    );
    sys.insert_boundary_rows()
}

/// Spectrum, oracle comparison and diagnostics of one requested mode.
#[derive(Debug, Clone)]
pub struct BesselRun {
    pub m: u32,
    pub n: usize,
    /// Eigenvalues `κ²` in ascending order.
    pub spectrum: EigenResult,
    pub kappa: Vec<f64>,
    /// `|κ_n − j_{m,n+1}| / j_{m,n+1}`.
    pub oracle_error: Vec<f64>,
    /// Largest imaginary part relative to modulus over the whole spectrum.
    pub max_imag_ratio: f64,
    pub min_real: f64,
    pub mode: usize,
    pub eigenfunction: RadialCoeffs<Complex64>,
    /// Log-log slope of `|f|` between `r = 10⁻³` and `2·10⁻³`.
    pub origin_slope: f64,
    /// One past the last coefficient above `10⁻¹⁰` of the peak.
    pub decay_index: usize,
}

/// Solves the Bessel problem and compares every eigenvalue with `J_m` zeros.
pub fn run_bessel(m: u32, n: usize, mode: usize) -> Result<BesselRun> {
    let sys = bessel_system(m, n)?;
    let spectrum = generalized_eig(&sys, EigOptions::default(), by_real_ascending)?;
    let kappa: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .map(|l| l.re.max(0.0).sqrt())
        .collect();
    let zeros = bessel_zeros(m as usize, kappa.len());
    let oracle_error = kappa
        .iter()
        .zip(&zeros)
        .map(|(k, z)| (k - z).abs() / z)
        .collect();
    let max_imag_ratio = spectrum
        .eigenvalues
        .iter()
        .map(|l| l.im.abs() / l.norm())
        .fold(0.0, f64::max);
    let min_real = spectrum
        .eigenvalues
        .iter()
        .map(|l| l.re)
        .fold(f64::INFINITY, f64::min);

    let mode = mode.min(spectrum.len().saturating_sub(1));
    let eigenfunction = RadialCoeffs::new(BasisId::new(0, m), spectrum.vectors[mode][0].clone());
    let (r1, r2) = (1e-3, 2e-3);
    let origin_slope =
        (eigenfunction.eval(r2)?.norm() / eigenfunction.eval(r1)?.norm()).ln() / (r2 / r1).ln();
    let peak = eigenfunction
        .values
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let decay_index = eigenfunction
        .values
        .iter()
        .rposition(|v| v.norm() > 1e-10 * peak)
        .map_or(0, |i| i + 1);

    Ok(BesselRun {
        m,
        n,
        spectrum,
        kappa,
        oracle_error,
        max_imag_ratio,
        min_real,
        mode,
        eigenfunction,
        origin_slope,
        decay_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axisymmetric_ground_state() {
        let run = run_bessel(0, 16, 0).unwrap();
        assert!((run.kappa[0] - 2.404_825_557_695_773).abs() < 1e-10 * 2.4);
        assert!(run.min_real > 0.0);
        assert!(run.max_imag_ratio == 0.0);
    }

    #[test]
    fn low_modes_converge_at_moderate_size() {
        let run = run_bessel(3, 60, 2).unwrap();
        for e in &run.oracle_error[..15] {
            assert!(*e < 1e-12, "{e}");
        }
        assert!((run.origin_slope - 3.0).abs() < 0.01);
    }
}
