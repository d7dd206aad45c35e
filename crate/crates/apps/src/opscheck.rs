//! Self-check of the operator library: commutation identities, grid action,
//! transforms, non-constant coefficients and tensor calculus.

use diskspec_core::ncc::{clenshaw_matrix, expand_radial, ExpansionKind, DEFAULT_TOL};
use diskspec_core::sparseops::format_sig17;
use diskspec_core::sparseops::grid_action::check_random_pairs;
use diskspec_core::sparseops::identities::{check_all, check_grid, OperatorSource};
use diskspec_core::tensor::{curl_z, divergence, gradient_scalar, laplacian_scalar};
use diskspec_core::transform::{check_transforms, RadialCoeffs};
use diskspec_core::{BasisId, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Tolerance of the commutation identities.
pub const IDENTITY_TOL: f64 = 1e-13;
/// Tolerance of the finite-difference grid comparison.
pub const GRID_TOL: f64 = 1e-8;
pub const TRANSFORM_TOL: f64 = 1e-13;
pub const NCC_TOL: f64 = 1e-11;
/// Relative to the largest Laplacian coefficient.
pub const TENSOR_TOL: f64 = 1e-13;

/// One line of the report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub suite: &'static str,
    pub name: String,
    pub k: u32,
    pub m: u32,
    pub n: usize,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Full pass/fail report.
#[derive(Debug, Clone, Serialize)]
pub struct OpsReport {
    pub schema_version: u32,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckLine>,
}

impl OpsReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// CSV with header `suite,name,k,m,n,deviation,tolerance,passed`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("suite,name,k,m,n,deviation,tolerance,passed\n");
        for c in &self.checks {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.suite,
                c.name,
                c.k,
                c.m,
                c.n,
                format_sig17(c.deviation),
                format_sig17(c.tolerance),
                c.passed
            ));
        }
        s
    }
}

/// Sizes exercised by the randomized part of the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpsSizes {
    /// `N` of the fixed identity grid `k ≤ 3`, `1 ≤ m ≤ 10`.
    pub identity_n: usize,
    /// Number of extra random `(k, m, N)` identity triples.
    pub random_triples: usize,
    pub grid_pairs: usize,
    pub transform_nr: usize,
}

impl Default for OpsSizes {
    fn default() -> Self {
        Self {
            identity_n: 32,
            random_triples: 12,
            grid_pairs: 20,
            transform_nr: 32,
        }
    }
}

fn ncc_lines(rng: &mut ChaCha8Rng, out: &mut Vec<CheckLine>) -> Result<()> {
    let f = |r: f64| 1.0 + r * r - 0.5 * r.powi(4);
    let g = |r: f64| (0.5 * r * r).exp();
    for kind in [ExpansionKind::Legendre, ExpansionKind::Chebyshev] {
        let ef = expand_radial(f, kind, DEFAULT_TOL);
        let eg = expand_radial(g, kind, DEFAULT_TOL);
        let efg = expand_radial(|r| f(r) * g(r), kind, DEFAULT_TOL);
        let (k, m, n) = (
            rng.gen_range(0..=3),
            rng.gen_range(0..=20),
            rng.gen_range(24..=48),
        );
        let src = BasisId::new(k, m);
        let lhs = clenshaw_matrix(&ef, src, n)?.product(&clenshaw_matrix(&eg, src, n)?)?;
        let rhs = clenshaw_matrix(&efg, src, n)?;
        let mask = ef.n_f() + eg.n_f();
        let deviation = lhs.max_deviation(&rhs, n.saturating_sub(mask));
        out.push(CheckLine {
            suite: "ncc",
            name: format!("product_{kind:?}").to_lowercase(),
            k,
            m,
            n,
            deviation,
            tolerance: NCC_TOL,
            passed: deviation <= NCC_TOL,
        });
    }
    Ok(())
}

fn tensor_lines(rng: &mut ChaCha8Rng, out: &mut Vec<CheckLine>) -> Result<()> {
    for _ in 0..4 {
        let m: i64 = rng.gen_range(0..=12);
        let n = rng.gen_range(8..=40);
        let vals: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let f = RadialCoeffs::new(BasisId::new(0, m as u32), vals.clone());
        let grad = gradient_scalar(&f, m)?;
        let div = divergence(&grad)?;
        let lap = laplacian_scalar(m, n).matvec(&vals)?;
        let scale = lap.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let d1 = div
            .values
            .iter()
            .zip(&lap)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale;
        let d2 = curl_z(&grad)?
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
            / scale;
        for (name, deviation) in [("div_grad_is_laplacian", d1), ("curl_grad_vanishes", d2)] {
            out.push(CheckLine {
                suite: "tensor",
                name: name.into(),
                k: 0,
                m: m as u32,
                n,
                deviation,
                tolerance: TENSOR_TOL,
                passed: deviation <= TENSOR_TOL,
            });
        }
    }
    Ok(())
}

/// Runs every suite against `src`; deterministic for a fixed `seed`.
pub fn run_opscheck<S: OperatorSource>(src: &S, seed: u64, sizes: OpsSizes) -> Result<OpsReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut identities = check_grid(src, 3, 10, sizes.identity_n, IDENTITY_TOL)?;
    for _ in 0..sizes.random_triples {
        let (k, m, n) = (
            rng.gen_range(0..=3),
            rng.gen_range(1..=20),
            rng.gen_range(8..=64),
        );
        identities.extend(check_all(src, k, m, n, IDENTITY_TOL)?);
    }
    checks.extend(identities.into_iter().map(|c| CheckLine {
        suite: "identity",
        name: c.name.into(),
        k: c.k,
        m: c.m,
        n: c.n,
        deviation: c.deviation,
        tolerance: c.tolerance,
        passed: c.passed(),
    }));

    let grid = check_random_pairs(src, sizes.grid_pairs, 8, rng.gen(), GRID_TOL)?;
    checks.extend(grid.into_iter().map(|c| CheckLine {
        suite: "grid_action",
        name: format!("{:?}", c.operator).to_lowercase(),
        k: c.k,
        m: c.m,
        n: 8,
        deviation: c.deviation,
        tolerance: c.tolerance,
        passed: c.passed(),
    }));

    let transforms = check_transforms(3, 20, sizes.transform_nr, rng.gen(), TRANSFORM_TOL)?;
    checks.extend(transforms.into_iter().map(|c| CheckLine {
        suite: "transform",
        name: "round_trip".into(),
        k: c.k,
        m: c.m,
        n: c.n_r,
        deviation: c.round_trip,
        tolerance: c.tolerance,
        passed: c.passed(),
    }));

    ncc_lines(&mut rng, &mut checks)?;
    tensor_lines(&mut rng, &mut checks)?;

    Ok(OpsReport {
        schema_version: 1,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
