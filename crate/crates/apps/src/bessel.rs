//! Bessel functions of the first kind and their zeros, used as an
//! independent oracle for the spectral eigenvalues.
//!
//! `J_0..J_m` come from Miller's downward recurrence normalized by
//! `J_0 + 2 Σ J_{2k} = 1`; zeros are bracketed on a fine scan and bisected.

/// `J_0(x), ..., J_{m_max}(x)` for `x ≥ 0`.
pub fn bessel_j_all(m_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; m_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = m_max.max(x as usize);
    let start = 2 * ((top + 20 + (40.0 * top as f64).sqrt() as usize) / 2);
    let mut next = 0.0f64;
    let mut cur = 1e-300f64;
    let mut norm = 0.0f64;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        let order = k - 1;
        if order <= m_max {
            out[order] = cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

pub fn bessel_j(m: usize, x: f64) -> f64 {
    bessel_j_all(m + 1, x)[m]
}

/// `J_m'(x) = (J_{m-1} - J_{m+1}) / 2`, with `J_{-1} = -J_1`.
pub fn bessel_jp(m: usize, x: f64) -> f64 {
    let j = bessel_j_all(m + 1, x);
    let below = if m == 0 { -j[1] } else { j[m - 1] };
    0.5 * (below - j[m + 1])
}

/// Ascending series, accurate for moderate `x`; kept as an independent check.
pub fn bessel_j_series(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (0..m).fold(1.0, |acc, j| acc * half / (j + 1) as f64);
    let mut sum = term;
    for k in 1..200 {
        term *= -half * half / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Roots of `f` in `(lo, hi]` located by sign changes on a uniform scan and
/// refined by bisection to machine precision.
pub fn scan_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64, limit: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    while a < hi && roots.len() < limit {
        let b = (a + step).min(hi);
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            roots.push(bisect(&f, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    roots
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// The first `count` positive zeros of `J_m`.
pub fn bessel_zeros(m: usize, count: usize) -> Vec<f64> {
    // j_{m,1} > m, and consecutive zeros are more than π/2 apart
    let lo = if m == 0 { 1e-3 } else { m as f64 };
    let hi = lo + std::f64::consts::PI * (count as f64 + m as f64 + 4.0);
    scan_roots(|x| bessel_j(m, x), lo, hi, 0.1, count)
}

/// Inertial-wave frequencies `ω = sα/√(κ² + α²)` whose `κ` solves
/// `κωJ_m'(κ) + mJ_m(κ) = 0`, for `κ ≤ kappa_max` and both signs `s`.
/// Returned in ascending order.
pub fn inertial_frequencies(m: usize, alpha: f64, kappa_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for s in [-1.0, 1.0] {
        let omega = |kappa: f64| s * alpha / (kappa * kappa + alpha * alpha).sqrt();
        let f = |kappa: f64| {
            let j = bessel_j_all(m + 1, kappa);
            let below = if m == 0 { -j[1] } else { j[m - 1] };
            kappa * omega(kappa) * 0.5 * (below - j[m + 1]) + m as f64 * j[m]
        };
        out.extend(
            scan_roots(f, 1e-3, kappa_max, 0.05, usize::MAX)
                .into_iter()
                .map(omega),
        );
    }
    out.sort_by(f64::total_cmp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_series() {
        for m in [0, 1, 2, 7, 20] {
            for x in [0.1, 1.0, 3.7, 6.5, 9.2] {
                let a = bessel_j(m, x);
                let b = bessel_j_series(m, x);
                assert!((a - b).abs() < 1e-13, "m={m} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn known_values() {
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 10.0) - 0.043_472_746_168_861_44).abs() < 1e-15);
        assert!((bessel_j(0, 15.0) + 0.014_224_472_826_780_773).abs() < 1e-15);
        assert!((bessel_jp(0, 2.0) + bessel_j(1, 2.0)).abs() < 1e-15);
    }

    #[test]
    fn first_zeros() {
        let z = bessel_zeros(0, 3);
        assert!((z[0] - 2.404_825_557_695_773).abs() < 1e-13);
        assert!((z[1] - 5.520_078_110_286_311).abs() < 1e-13);
        assert!((z[2] - 8.653_727_912_911_012).abs() < 1e-13);
        let z1 = bessel_zeros(1, 1);
        assert!((z1[0] - 3.831_705_970_207_512).abs() < 1e-13);
    }

    #[test]
    fn large_order_zero() {
        let z = bessel_zeros(50, 201);
        assert!((z[200] - 707.447066905).abs() < 1e-8, "{}", z[200]);
        assert!((z[0] - 57.1).abs() < 0.05);
    }

    #[test]
    fn inertial_roots_solve_relation() {
        let w = inertial_frequencies(1, 1.0, 30.0);
        assert!(w.iter().all(|x| x.abs() < 1.0));
        let kappa = |om: f64| ((1.0 - om * om) / (om * om)).sqrt();
        for &om in &w {
            let k = kappa(om);
            let res = k * om * bessel_jp(1, k) + bessel_j(1, k);
            assert!(res.abs() < 1e-12, "{om}");
        }
    }
}
