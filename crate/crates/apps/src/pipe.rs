//! Linear stability of pipe Poiseuille flow `W = 1 − r²`.
//!
//! Unknowns `Ξ = (v⁺, v⁻, w, p)` at axial wavenumber `α` and azimuthal order
//! `m` satisfy `𝓛Ξ = −λ𝓡Ξ`; no-slip rows replace the last row of each
//! velocity equation. Perturbations vary along the axis as `e^{−iαz}`, the
//! orientation under which the slowest centre modes travel with `Im λ > 0`.

use diskspec_core::bandlinalg::{
    by_real_descending, generalized_eig, refine_mode, Block, BlockSystem, BoundaryRow, EigOptions,
    EigenResult, Field,
};
use diskspec_core::basis::restriction_row;
use diskspec_core::sparseops::{convert, d_signed, r_signed, z_matrix};
use diskspec_core::tensor::{curl_z, laplacian_component, polar_from_spin_values, SpinVector};
use diskspec_core::transform::{grid_for, RadialCoeffs};
use diskspec_core::{BandedMatrix, BasisId, DiskError, Result};
use num_complex::Complex64;
use serde::Serialize;

use crate::fields::{sample, sample_with, GridField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Flow parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipeParams {
    pub m: u32,
    pub alpha: f64,
    pub re: f64,
    pub n: usize,
}

/// The axial derivative `∂_z → −iα`.
fn axial(p: &PipeParams) -> Complex64 {
    -I * p.alpha
}

fn cc(b: BasisId, n: usize) -> Result<BandedMatrix> {
    convert(BasisId::new(b.k + 1, b.m), n).product(&convert(b, n))
}

/// `−iαCC·W − 2νD⁻D⁺ + να²CC` on the component with signed index `ms`.
fn component_operator(ms: i64, p: &PipeParams) -> Result<Block> {
    let b = BasisId::signed(0, ms);
    let n = p.n;
    let nu = 1.0 / p.re;
    let identity = BandedMatrix::identity(n, b);
    let profile = identity.axpby(0.5, &z_matrix(b, n), -0.5)?;
    let c2 = cc(b, n)?;
    let advect = c2.product(&profile)?;
    Block::scaled(axial(p), advect)
        .plus(Complex64::from(-nu), laplacian_component(0, ms, n))?
        .plus(Complex64::from(nu * p.alpha * p.alpha), c2)
}

/// Assembled pencil with boundary rows in place.
pub fn pipe_system(p: &PipeParams) -> Result<BlockSystem> {
    let (m, n) = (p.m as i64, p.n);
    let bp = BasisId::signed(0, m + 1);
    let bm = BasisId::signed(0, m - 1);
    let bw = BasisId::signed(0, m);
    let mut sys = BlockSystem::square(vec![
        Field::new("v+", bp, n),
        Field::new("v-", bm, n),
        Field::new("w", bw, n),
        Field::new("p", bw, n),
    ]);
    for (i, ms) in [m + 1, m - 1, m].into_iter().enumerate() {
        sys.set_lhs(i, i, component_operator(ms, p)?)?;
        sys.set_rhs(
            i,
            i,
            Block::real(cc(BasisId::signed(0, ms), n)?.scale(-1.0)),
        )?;
    }
    sys.set_lhs(
        0,
        3,
        Block::real(convert(BasisId::signed(1, m + 1), n).product(&d_signed(1, 0, m, n))?),
    )?;
    sys.set_lhs(
        1,
        3,
        Block::real(convert(BasisId::signed(1, m - 1), n).product(&d_signed(-1, 0, m, n))?),
    )?;
    let c2w = cc(bw, n)?;
    let s2 = -std::f64::consts::SQRT_2;
    sys.set_lhs(
        2,
        0,
        Block::real(c2w.product(&r_signed(-1, 0, m + 1, n))?.scale(s2)),
    )?;
    sys.set_lhs(
        2,
        1,
        Block::real(c2w.product(&r_signed(1, 0, m - 1, n))?.scale(s2)),
    )?;
    sys.set_lhs(2, 3, Block::scaled(axial(p), c2w))?;
    sys.set_lhs(3, 0, Block::real(d_signed(-1, 0, m + 1, n)))?;
    sys.set_lhs(3, 1, Block::real(d_signed(1, 0, m - 1, n)))?;
    sys.set_lhs(3, 2, Block::scaled(axial(p), convert(bw, n)))?;
    for (i, b) in [bp, bm, bw].into_iter().enumerate() {
        sys.add_boundary_row(BoundaryRow::new(i, ZERO).with_restriction(
            i,
            &restriction_row(b, 0, n)?,
            ONE,
        ));
    }
    sys.insert_boundary_rows()
}

/// Radial localization of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Centre,
    Wall,
}

/// Critical-layer radius `r_c` where the base flow matches the phase speed,
/// `W(r_c) = Im λ / α`, clamped to `[0, 1]`.
pub fn critical_radius(lambda: Complex64, alpha: f64) -> f64 {
    let c = lambda.im / alpha;
    (1.0 - c).clamp(0.0, 1.0).sqrt()
}

/// Centre modes have their critical layer inside `r = 1/√2`.
pub fn classify(lambda: Complex64, alpha: f64) -> ModeKind {
    if critical_radius(lambda, alpha) < std::f64::consts::FRAC_1_SQRT_2 {
        ModeKind::Centre
    } else {
        ModeKind::Wall
    }
}

/// Eigenvalues above this magnitude are the roundoff images of the
/// infinite eigenvalues introduced by the pressure constraint.
pub fn spurious_threshold(p: &PipeParams) -> f64 {
    1e3 * (p.n as f64).powi(4).max(p.re) / p.re
}

/// One eigenmode with its classification and eigenvector.
#[derive(Debug, Clone)]
pub struct PipeMode {
    /// Position in the spectrum sorted by decreasing real part.
    pub index: usize,
    pub eigenvalue: Complex64,
    pub residual: f64,
    pub kind: ModeKind,
    /// Energy-weighted mean radius of the eigenfunction.
    pub centroid: f64,
    /// Coefficient columns `v⁺, v⁻, w, p`.
    pub fields: Vec<Vec<Complex64>>,
}

/// `∫ r |u|² r dr / ∫ |u|² r dr` with `|u|² = |v⁺|² + |v⁻|² + |w|²`.
pub fn energy_centroid(sys: &BlockSystem, fields: &[Vec<Complex64>]) -> Result<f64> {
    let grid = grid_for(2 * fields[0].len() + 8)?;
    let cols: Vec<RadialCoeffs<Complex64>> = sys.fields()[..3]
        .iter()
        .zip(fields)
        .map(|(f, c)| RadialCoeffs::new(f.basis, c.clone()))
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for (&r, &w) in grid.radii_r.iter().zip(&grid.weights_w) {
        let mut e = 0.0;
        for c in &cols {
            e += c.eval(r)?.norm_sqr();
        }
        num += w * r * e;
        den += w * e;
    }
    Ok(num / den)
}

/// Spectrum plus the slowest-decaying centre and wall modes.
#[derive(Debug, Clone)]
pub struct PipeRun {
    pub params: PipeParams,
    /// Growth rates sorted by decreasing real part.
    pub spectrum: EigenResult,
    pub centre: Option<PipeMode>,
    pub wall: Option<PipeMode>,
}

impl PipeRun {
    pub fn leading(&self, kind: ModeKind) -> Option<&PipeMode> {
        match kind {
            ModeKind::Centre => self.centre.as_ref(),
            ModeKind::Wall => self.wall.as_ref(),
        }
    }

    /// Computed eigenvalue nearest to `target`.
    pub fn nearest(&self, target: Complex64) -> Complex64 {
        nearest(&self.spectrum, target)
    }
}

fn refine(sys: &BlockSystem, p: &PipeParams, index: usize, lam: Complex64) -> Result<PipeMode> {
    let shift = lam + Complex64::new(1e-10, 1e-10) * lam.norm().max(1e-3);
    let refined = refine_mode(sys, shift, 3)?;
    Ok(PipeMode {
        index,
        eigenvalue: lam,
        residual: refined.residual,
        kind: classify(lam, p.alpha),
        centroid: energy_centroid(sys, &refined.fields)?,
        fields: refined.fields,
    })
}

/// Assembled pencil and its finite spectrum, sorted by decreasing real part.
pub fn pipe_spectrum(params: &PipeParams) -> Result<(BlockSystem, EigenResult)> {
    if params.re <= 0.0 || params.alpha == 0.0 {
        return Err(DiskError::Parameter(
            "pipe flow needs Re > 0 and alpha != 0".into(),
        ));
    }
    let sys = pipe_system(params)?;
    let opts = EigOptions {
        vectors: false,
        max_magnitude: spurious_threshold(params),
    };
    let spectrum = generalized_eig(&sys, opts, by_real_descending)?;
    Ok((sys, spectrum))
}

/// Computed eigenvalue nearest to `target`.
pub fn nearest(spectrum: &EigenResult, target: Complex64) -> Complex64 {
    spectrum
        .eigenvalues
        .iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

/// Solves the stability problem and extracts the leading mode of each kind.
pub fn run_pipe(params: PipeParams) -> Result<PipeRun> {
    let (sys, spectrum) = pipe_spectrum(&params)?;
    let first = |kind| {
        spectrum
            .eigenvalues
            .iter()
            .position(|&l| classify(l, params.alpha) == kind)
            .map(|i| refine(&sys, &params, i, spectrum.eigenvalues[i]))
            .transpose()
    };
    let centre = first(ModeKind::Centre)?;
    let wall = first(ModeKind::Wall)?;
    Ok(PipeRun {
        params,
        spectrum,
        centre,
        wall,
    })
}

/// Stream function from `2D⁻D⁺ψ = ω₃` with `ψ(1) = 0`, and `ω₃` itself.
pub fn streamfunction(
    m: u32,
    plus: &[Complex64],
    minus: &[Complex64],
) -> Result<(RadialCoeffs<Complex64>, RadialCoeffs<Complex64>)> {
    let n = plus.len();
    let v = SpinVector::new(m as i64, 0, plus.to_vec(), minus.to_vec());
    let omega = curl_z(&v)?;
    let b = BasisId::new(0, m);
    let mut sys = BlockSystem::square(vec![Field::new("psi", b, n)]);
    sys.set_lhs(0, 0, Block::real(laplacian_component(0, m as i64, n)))?;
    sys.set_forcing(0, omega.values.clone())?;
    sys.add_boundary_row(BoundaryRow::new(0, ZERO).with_restriction(
        0,
        &restriction_row(b, 0, n)?,
        ONE,
    ));
    let psi = sys.insert_boundary_rows()?.solve()?;
    Ok((RadialCoeffs::new(b, psi[0].clone()), omega))
}

/// Full-disk samples of `p, v_r, v_θ, w, ω₃, ψ` for one mode.
pub fn mode_fields(
    m: u32,
    mode: &PipeMode,
    radii: &[f64],
    n_theta: usize,
) -> Result<Vec<GridField>> {
    let ms = m as i64;
    let plus = RadialCoeffs::new(BasisId::signed(0, ms + 1), mode.fields[0].clone());
    let minus = RadialCoeffs::new(BasisId::signed(0, ms - 1), mode.fields[1].clone());
    let w = RadialCoeffs::new(BasisId::new(0, m), mode.fields[2].clone());
    let p = RadialCoeffs::new(BasisId::new(0, m), mode.fields[3].clone());
    let (psi, omega) = streamfunction(m, &mode.fields[0], &mode.fields[1])?;
    let polar = |r: f64| -> Result<(Complex64, Complex64)> {
        let (vr, vt) = polar_from_spin_values(&[plus.eval(r)?], &[minus.eval(r)?]);
        Ok((vr[0], vt[0]))
    };
    Ok(vec![
        sample("p", &p, ms, radii, n_theta)?,
        sample_with("v_r", |r| Ok(polar(r)?.0), ms, radii, n_theta)?,
        sample_with("v_theta", |r| Ok(polar(r)?.1), ms, radii, n_theta)?,
        sample("w", &w, ms, radii, n_theta)?,
        sample("omega3", &omega, ms, radii, n_theta)?,
        sample("psi", &psi, ms, radii, n_theta)?,
    ])
}

/// Reference growth rates: `(m, kind, Re, λ)`.
pub const REFERENCE: [(u32, ModeKind, f64, f64, f64); 12] = [
    (1, ModeKind::Centre, 1e4, -0.0227049145535, 0.951481194735),
    (1, ModeKind::Wall, 1e4, -0.0472321995947, 0.273788709331),
    (5, ModeKind::Centre, 1e4, -0.0725274157946, 0.898561158159),
    (5, ModeKind::Wall, 1e4, -0.0793504734563, 0.247410847332),
    (12, ModeKind::Wall, 1e4, -0.0948648867252, 0.144951983763),
    (12, ModeKind::Centre, 1e4, -0.170456145014, 0.800901547889),
    (1, ModeKind::Centre, 1e7, -0.000721091206991, 0.998464685977),
    (1, ModeKind::Wall, 1e7, -0.00748956875998, 0.0303389812102),
    (5, ModeKind::Centre, 1e7, -0.00229096203822, 0.996790918537),
    (5, ModeKind::Wall, 1e7, -0.00855398926555, 0.0148836399355),
    (12, ModeKind::Centre, 1e7, -0.00538731680888, 0.993703412087),
    (12, ModeKind::Wall, 1e7, -0.00784725003139, 0.0296167267785),
];
