use diskspec::bessel::bessel_zeros;
use diskspec::bessel_modes::run_bessel;
use diskspec::helmholtz::{run_helmholtz, Forcing, HelmholtzParams};
use diskspec::inertial::run_inertial;
use diskspec::pipe::{nearest, pipe_spectrum, run_pipe, ModeKind, PipeParams, REFERENCE};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn high_order_bessel_mode_shape() {
    let run = run_bessel(50, 500, 200).unwrap();
    assert!(
        (run.origin_slope - 50.0).abs() <= 0.5,
        "{}",
        run.origin_slope
    );
    assert!(
        (300..=460).contains(&run.decay_index),
        "{}",
        run.decay_index
    );
    assert!((run.kappa[0] - 57.1).abs() < 0.05);
    assert!((run.kappa[0] - bessel_zeros(50, 1)[0]).abs() < 1e-10 * run.kappa[0]);
}

#[test]
fn inertial_spectrum_is_one_sided() {
    let run = run_inertial(1, 1.0, 120).unwrap();
    let omega = run.omega();
    assert_eq!(run.max_imag, 0.0);
    assert!(run.max_abs < 1.0);
    // ω → −ω is not a symmetry for m ≠ 0
    assert!((omega[0] + omega[omega.len() - 1]).abs() > 0.05);
    assert!(run.max_resolved_error() < 1e-8);
}

#[test]
fn pipe_converges_at_moderate_resolution() {
    for m in [1, 5, 12] {
        let spectrum = |n| {
            pipe_spectrum(&PipeParams {
                m,
                alpha: 1.0,
                re: 1e4,
                n,
            })
            .unwrap()
            .1
        };
        let (a, b) = (spectrum(50), spectrum(66));
        for (rm, _, re, lr, li) in REFERENCE {
            if rm != m || re != 1e4 {
                continue;
            }
            let t = Complex64::new(lr, li);
            let (la, lb) = (nearest(&a, t), nearest(&b, t));
            assert!((la - t).norm() < 1e-10, "m={m}: {la} vs {t}");
            assert!(
                (la - lb).norm() < 1e-10,
                "m={m}: drift {}",
                (la - lb).norm()
            );
        }
    }
}

#[test]
fn leading_modes_follow_reference_ordering() {
    for (m, centre_index, wall_index) in [(1, 0, 1), (5, 0, 1), (12, 3, 0)] {
        let run = run_pipe(PipeParams {
            m,
            alpha: 1.0,
            re: 1e4,
            n: 64,
        })
        .unwrap();
        assert_eq!(
            run.leading(ModeKind::Centre).unwrap().index,
            centre_index,
            "m={m}"
        );
        assert_eq!(
            run.leading(ModeKind::Wall).unwrap().index,
            wall_index,
            "m={m}"
        );
    }
}

#[test]
fn helmholtz_origin_is_smooth() {
    let run = run_helmholtz(&Forcing::gaussian(), &HelmholtzParams::new(60.0, 1e-10)).unwrap();
    let (inner, outer) = run.origin_extrema(0.05, 200, 128).unwrap();
    assert!(inner.is_finite() && inner <= outer);
    assert!(run.report.max_residual <= 1e-10);
    let total: usize = run
        .report
        .per_m
        .iter()
        .map(|r| if r.m == 0 { r.n_used } else { 2 * r.n_used })
        .sum();
    assert_eq!(total, run.report.total_coeffs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn harmonic_extension_of_fourier_data(j in 0u32..12, phase in 0.0f64..6.3, r in 0.0f64..1.0, t in 0.0f64..6.3) {
        // ∇²f = 0 with f(1, θ) = cos(jθ + φ) gives f = r^j cos(jθ + φ)
        let forcing = Forcing {
            source: Box::new(|_, _| 0.0),
            boundary: Box::new(move |th| (j as f64 * th + phase).cos()),
        };
        let run = run_helmholtz(&forcing, &HelmholtzParams::new(0.0, 1e-12)).unwrap();
        let exact = r.powi(j as i32) * (j as f64 * t + phase).cos();
        prop_assert!((run.eval(r, t).unwrap() - exact).abs() < 1e-12);
    }
}
