//! Operator matrices checked against their definitions on radial samples.
//!
//! A random coefficient column is pushed through each operator and the
//! result evaluated at interior radii. The expected values come from the
//! input function itself: multiplication by `r`, `1 - r²` or `2r² - 1`, or
//! `(1/√2)(f' ∓ m f / r)` with `f'` from a sixth-order central difference.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::BasisId;
use crate::error::Result;
use crate::sparseops::identities::OperatorSource;
use crate::sparseops::{OperatorKind, OperatorTag};
use crate::transform::RadialCoeffs;

/// Outcome of one operator at one `(k, m)`.
#[derive(Debug, Clone, Serialize)]
pub struct GridActionCheck {
    pub operator: OperatorKind,
    pub k: u32,
    pub m: u32,
    pub deviation: f64,
    pub tolerance: f64,
}

impl GridActionCheck {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

const STEP: f64 = 1e-3;
const SAMPLES: [f64; 7] = [0.12, 0.25, 0.38, 0.5, 0.63, 0.77, 0.9];

fn derivative(f: &dyn Fn(f64) -> Result<f64>, r: f64) -> Result<f64> {
    const W: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    let mut acc = 0.0;
    for (j, w) in W.iter().enumerate() {
        let h = (j + 1) as f64 * STEP;
        acc += w * (f(r + h)? - f(r - h)?);
    }
    Ok(acc / STEP)
}

/// Checks every operator defined at `(k, m)` on a random column of length `n`.
///
/// Operators are built one size larger and fed a zero-padded input, so the
/// outputs carry no truncation error.
pub fn check_grid_action<S: OperatorSource>(
    src: &S,
    k: u32,
    m: u32,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<GridActionCheck>> {
    use OperatorKind::*;
    let basis = BasisId::new(k, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((k as u64) << 32) ^ m as u64);
    let mut coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    coeffs.push(0.0);
    let input = RadialCoeffs::new(basis, coeffs.clone());
    let f = |r: f64| input.eval(r);
    let mf = m as f64;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;

    let mut kinds = vec![Dplus, Rplus, Rminus, C, Z];
    if m >= 1 {
        kinds.push(Dminus);
    }
    if k >= 1 {
        kinds.push(Cdag);
    }
    let mut out = Vec::new();
    for kind in kinds {
        let tag = OperatorTag::new(kind, basis);
        let op = src.op(kind, basis, n + 1)?;
        let result = RadialCoeffs::new(tag.codomain()?, op.matvec(&coeffs)?);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for &r in &SAMPLES {
            let fr = f(r)?;
            let expected = match kind {
                Dplus => inv_sqrt2 * (derivative(&f, r)? - mf * fr / r),
                Dminus => inv_sqrt2 * (derivative(&f, r)? + mf * fr / r),
                Rplus | Rminus => r * fr,
                C => fr,
                Cdag => (1.0 - r * r) * fr,
                Z => (2.0 * r * r - 1.0) * fr,
                B | Identity => unreachable!("not part of the grid check"),
            };
            worst = worst.max((result.eval(r)? - expected).abs());
            scale = scale.max(expected.abs());
        }
        out.push(GridActionCheck {
            operator: kind,
            k,
            m,
            deviation: worst / scale.max(1.0),
            tolerance: tol,
        });
    }
    Ok(out)
}

/// Runs [`check_grid_action`] on `pairs` distinct random `(k, m)` with `k ≤ 3`, `m ≤ 20`.
pub fn check_random_pairs<S: OperatorSource>(
    src: &S,
    pairs: usize,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<GridActionCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    while seen.len() < pairs.min(4 * 21) {
        let (k, m) = (rng.gen_range(0..=3), rng.gen_range(0..=20));
        if seen.insert((k, m)) {
            out.extend(check_grid_action(src, k, m, n, rng.gen(), tol)?);
        }
    }
    Ok(out)
}
