use diskspec_core::ncc::{clenshaw_matrix, expand_radial, ExpansionKind, DEFAULT_TOL};
use diskspec_core::sparseops::{convert, convert_down, d_minus, d_plus, r_minus, r_plus, z_matrix};
use diskspec_core::tensor::{curl_z, divergence, gradient_scalar, laplacian_scalar};
use diskspec_core::transform::{forward, grid_for, RadialCoeffs};
use diskspec_core::{BandedMatrix, BasisId, DiskError};
use num_complex::Complex64;
use proptest::prelude::*;

/// Random coefficients with two trailing zeros, so that operators raising
/// the polynomial degree by one stay exact after truncation.
fn padded(values: Vec<f64>) -> Vec<f64> {
    let mut v = values;
    v.extend([0.0, 0.0]);
    v
}

fn apply(a: &BandedMatrix, f: &[f64]) -> RadialCoeffs<f64> {
    RadialCoeffs::new(a.codomain(), a.matvec(f).unwrap())
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * scale.max(1.0)
}

fn coeff_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplicative_operators_act_pointwise(
        k in 0u32..4, m in 1u32..15, c in coeff_vec(), r in 0.05f64..0.99
    ) {
        let b = BasisId::new(k, m);
        let f = padded(c);
        let n = f.len();
        let fr = RadialCoeffs::new(b, f.clone()).eval(r).unwrap();
        let scale: f64 = f.iter().map(|x| x.abs()).sum::<f64>() * 1e3;

        prop_assert!(close(apply(&r_plus(b, n), &f).eval(r).unwrap(), r * fr, scale));
        prop_assert!(close(apply(&r_minus(b, n), &f).eval(r).unwrap(), r * fr, scale));
        prop_assert!(close(apply(&convert(b, n), &f).eval(r).unwrap(), fr, scale));
        prop_assert!(close(apply(&z_matrix(b, n), &f).eval(r).unwrap(), (2.0 * r * r - 1.0) * fr, scale));
        if k > 0 {
            prop_assert!(close(apply(&convert_down(b, n).unwrap(), &f).eval(r).unwrap(), (1.0 - r * r) * fr, scale));
        }
    }

    #[test]
    fn laplacian_of_monomials(m in 0u32..15, j in 0u32..6, r in 0.05f64..1.0) {
        // ∇²(r^p e^{imθ}) = (p² − m²) r^{p−2} e^{imθ}, p = m + 2j
        let p = (m + 2 * j) as i32;
        let b = BasisId::new(0, m);
        let grid = grid_for(20).unwrap();
        let samples: Vec<f64> = grid.radii_r.iter().map(|x| x.powi(p)).collect();
        let f = forward(b, &samples, &grid).unwrap();
        let f = RadialCoeffs::new(b, padded(f.values[..=j as usize].to_vec()));
        let lap = apply(&laplacian_scalar(m as i64, f.len()), &f.values);
        prop_assert_eq!(lap.basis, BasisId::new(2, m));
        let exact = ((p * p) as f64 - (m * m) as f64) * if p >= 2 { r.powi(p - 2) } else { 0.0 };
        prop_assert!(close(lap.eval(r).unwrap(), exact, 1e2), "{} vs {}", lap.eval(r).unwrap(), exact);
    }

    #[test]
    fn ladder_operators_differentiate_monomials(m in 1u32..15, j in 0u32..6, r in 0.05f64..1.0) {
        // D± r^p e^{imθ} = (p ∓ m)/√2 r^{p−1} e^{i(m±1)θ}
        let p = (m + 2 * j) as i32;
        let b = BasisId::new(0, m);
        let grid = grid_for(20).unwrap();
        let samples: Vec<f64> = grid.radii_r.iter().map(|x| x.powi(p)).collect();
        let f = forward(b, &samples, &grid).unwrap();
        let f = RadialCoeffs::new(b, padded(f.values[..=j as usize].to_vec()));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let up = apply(&d_plus(b, f.len()), &f.values).eval(r).unwrap();
        let down = apply(&d_minus(b, f.len()).unwrap(), &f.values).eval(r).unwrap();
        prop_assert!(close(up, s * (p as f64 - m as f64) * r.powi(p - 1), 1e2));
        prop_assert!(close(down, s * (p as f64 + m as f64) * r.powi(p - 1), 1e2));
    }

    #[test]
    fn non_constant_coefficients_multiply(
        k in 0u32..3, m in 0u32..12, c in coeff_vec(), r in 0.0f64..1.0, legendre in any::<bool>()
    ) {
        let kind = if legendre { ExpansionKind::Legendre } else { ExpansionKind::Chebyshev };
        let a = |x: f64| (0.5 * x * x).cos() + x.powi(4);
        let e = expand_radial(a, kind, DEFAULT_TOL);
        let b = BasisId::new(k, m);
        let mut f = c;
        f.resize(f.len() + e.n_f() + 2, 0.0);
        let n = f.len();
        let fr = RadialCoeffs::new(b, f.clone()).eval(r).unwrap();
        let af = apply(&clenshaw_matrix(&e, b, n).unwrap(), &f).eval(r).unwrap();
        let scale: f64 = f.iter().map(|x| x.abs()).sum::<f64>() * 1e2;
        prop_assert!((af - a(r) * fr).abs() <= 1e-11 * scale, "{} vs {}", af, a(r) * fr);
    }

    #[test]
    fn divergence_of_gradient_is_laplacian(m in -12i64..12, re in coeff_vec(), im in coeff_vec()) {
        let n = re.len().max(im.len()) + 2;
        let vals: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(*re.get(i).unwrap_or(&0.0), *im.get(i).unwrap_or(&0.0)))
            .collect();
        let f = RadialCoeffs::new(BasisId::new(0, m.unsigned_abs() as u32), vals.clone());
        let grad = gradient_scalar(&f, m).unwrap();
        let lap = laplacian_scalar(m, n).matvec(&vals).unwrap();
        let div = divergence(&grad).unwrap();
        let scale = lap.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for (a, b) in div.values.iter().zip(&lap) {
            prop_assert!((a - b).norm() <= 1e-13 * scale);
        }
        for v in &curl_z(&grad).unwrap().values {
            prop_assert!(v.norm() <= 1e-13 * scale);
        }
    }
}

#[test]
fn composition_checks_lattice_labels() {
    let n = 6;
    let a = d_plus(BasisId::new(0, 2), n);
    let wrong = convert(BasisId::new(0, 2), n);
    match a.product(&wrong) {
        Err(DiskError::Composition { expected, found }) => {
            assert_eq!(expected, BasisId::new(0, 2));
            assert_eq!(found, BasisId::new(1, 2));
        }
        other => panic!("{other:?}"),
    }
    assert!(wrong.product(&a).is_err());
    assert!(d_minus(BasisId::new(0, 0), n).is_err());
    assert!(convert_down(BasisId::new(0, 3), n).is_err());
}

#[test]
fn operators_are_narrow() {
    let b = BasisId::new(1, 4);
    let n = 30;
    for (a, lo, hi) in [
        (d_plus(b, n), 0, 1),
        (d_minus(b, n).unwrap(), 0, 1),
        (r_plus(b, n), 0, 1),
        (r_minus(b, n), 1, 0),
        (convert(b, n), 0, 1),
        (convert_down(b, n).unwrap(), 1, 0),
        (z_matrix(b, n), 1, 1),
        (laplacian_scalar(4, n), 0, 2),
    ] {
        assert!(
            a.lower_bandwidth() <= lo && a.upper_bandwidth() <= hi,
            "{:?}",
            (a.domain(), a.codomain())
        );
    }
}
