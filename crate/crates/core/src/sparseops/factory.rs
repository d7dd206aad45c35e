//! Constructors for the lattice operators, entry by entry.
//!
//! Every operator is the leading `N × N` section of its infinite matrix
//! acting on coefficient columns from the left (`B` is the one exception; it
//! is returned as the exact `(N+1) × N` section).

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::basis::{boundary_values, recurrence_a, recurrence_b, BasisId};
use crate::error::{DiskError, Result};
use crate::sparseops::BandedMatrix;

fn nf(n: usize) -> f64 {
    n as f64
}

fn km(src: BasisId) -> (f64, f64) {
    (src.k as f64, src.m as f64)
}

/// `D⁺ : (k,m) → (k+1,m+1)`, realizing `(d/dr - m/r)/√2`.
pub fn d_plus(src: BasisId, n: usize) -> BandedMatrix {
    let (k, m) = km(src);
    let sup = (1..n)
        .map(|j| (2.0 * nf(j) * (nf(j) + k + m + 1.0)).sqrt())
        .collect();
    BandedMatrix::from_bands(n, n, src, BasisId::new(src.k + 1, src.m + 1), [(1, sup)])
}

/// `D⁻ : (k,m) → (k+1,m-1)`, realizing `(d/dr + m/r)/√2`. Undefined at `m = 0`.
pub fn d_minus(src: BasisId, n: usize) -> Result<BandedMatrix> {
    if src.m == 0 {
        return Err(DiskError::LoweringAtZeroM(src));
    }
    let (k, m) = km(src);
    let diag = (0..n)
        .map(|j| (2.0 * (nf(j) + k + 1.0) * (nf(j) + m)).sqrt())
        .collect();
    Ok(BandedMatrix::from_bands(
        n,
        n,
        src,
        BasisId::new(src.k + 1, src.m - 1),
        [(0, diag)],
    ))
}

/// `R⁺ : (k,m) → (k,m+1)`, multiplication by `r`.
pub fn r_plus(src: BasisId, n: usize) -> BandedMatrix {
    let (k, m) = km(src);
    let diag = (0..n)
        .map(|j| {
            let j = nf(j);
            ((j + m + 1.0) * (j + k + m + 1.0)
                / ((2.0 * j + k + m + 1.0) * (2.0 * j + k + m + 2.0)))
                .sqrt()
        })
        .collect();
    let sup = (1..n)
        .map(|j| {
            let j = nf(j);
            (j * (j + k) / ((2.0 * j + k + m) * (2.0 * j + k + m + 1.0))).sqrt()
        })
        .collect();
    BandedMatrix::from_bands(
        n,
        n,
        src,
        BasisId::new(src.k, src.m + 1),
        [(0, diag), (1, sup)],
    )
}

/// `R⁻ : (k,m) → (k,m-1)`, multiplication by `r`. At `m = 0` this is `R⁺`.
pub fn r_minus(src: BasisId, n: usize) -> BandedMatrix {
    if src.m == 0 {
        return r_plus(src, n);
    }
    let (k, m) = km(src);
    let sub = (0..n.saturating_sub(1))
        .map(|j| {
            let j = nf(j);
            ((j + 1.0) * (j + k + 1.0) / ((2.0 * j + k + m + 1.0) * (2.0 * j + k + m + 2.0))).sqrt()
        })
        .collect();
    let diag = (0..n)
        .map(|j| {
            let j = nf(j);
            ((j + m) * (j + k + m) / ((2.0 * j + k + m) * (2.0 * j + k + m + 1.0))).sqrt()
        })
        .collect();
    BandedMatrix::from_bands(
        n,
        n,
        src,
        BasisId::new(src.k, src.m - 1),
        [(-1, sub), (0, diag)],
    )
}

/// `C : (k,m) → (k+1,m)`, the identity re-expanded one level up.
pub fn convert(src: BasisId, n: usize) -> BandedMatrix {
    let (k, m) = km(src);
    let diag = (0..n)
        .map(|j| {
            let j = nf(j);
            ((j + k + 1.0) * (j + k + m + 1.0)
                / ((2.0 * j + k + m + 1.0) * (2.0 * j + k + m + 2.0)))
                .sqrt()
        })
        .collect();
    let sup = (1..n)
        .map(|j| {
            let j = nf(j);
            -(j * (j + m) / ((2.0 * j + k + m) * (2.0 * j + k + m + 1.0))).sqrt()
        })
        .collect();
    BandedMatrix::from_bands(
        n,
        n,
        src,
        BasisId::new(src.k + 1, src.m),
        [(0, diag), (1, sup)],
    )
}

fn cdag_bands(src: BasisId, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (k, m) = km(src);
    let sub = (0..n)
        .map(|j| {
            let j = nf(j);
            -((j + 1.0) * (j + m + 1.0) / ((2.0 * j + k + m + 1.0) * (2.0 * j + k + m + 2.0)))
                .sqrt()
        })
        .collect();
    let diag = (0..n)
        .map(|j| {
            let j = nf(j);
            ((j + k) * (j + k + m) / ((2.0 * j + k + m) * (2.0 * j + k + m + 1.0))).sqrt()
        })
        .collect();
    (sub, diag)
}

/// `C† : (k,m) → (k-1,m)`, multiplication by `1 - r²`.
pub fn convert_down(src: BasisId, n: usize) -> Result<BandedMatrix> {
    if src.k == 0 {
        return Err(DiskError::LoweringAtZeroK(src));
    }
    let (sub, diag) = cdag_bands(src, n);
    Ok(BandedMatrix::from_bands(
        n,
        n,
        src,
        BasisId::new(src.k - 1, src.m),
        [(-1, sub), (0, diag)],
    ))
}

/// `Z` on `(k,m)`: multiplication by `z = 2r² - 1`, symmetric tridiagonal.
pub fn z_matrix(src: BasisId, n: usize) -> BandedMatrix {
    let diag = (0..n).map(|j| recurrence_a(src, j)).collect();
    let off: Vec<f64> = (1..n).map(|j| recurrence_b(src, j)).collect();
    BandedMatrix::from_bands(n, n, src, src, [(-1, off.clone()), (0, diag), (1, off)])
}

/// `B = C† + α⁻¹|0⟩⟨0|` from recombined coefficients in `(k,m)` to field
/// coefficients in `(k-1,m)`, with `α = Q_0^{k-1,m}(1)`.
///
/// Returned as the exact `(N+1) × N` section so that the represented
/// function satisfies `f(1) = g_0` without truncation error.
pub fn dirichlet_b(src: BasisId, n: usize) -> Result<BandedMatrix> {
    if src.k == 0 {
        return Err(DiskError::LoweringAtZeroK(src));
    }
    let dst = BasisId::new(src.k - 1, src.m);
    let (sub, mut diag) = cdag_bands(src, n);
    if n > 0 {
        diag[0] += 1.0 / boundary_values(dst, 1)[0];
    }
    Ok(BandedMatrix::from_bands(
        n + 1,
        n,
        src,
        dst,
        [(-1, sub), (0, diag)],
    ))
}

/// Complete recombination `f = B̃ g` on `N` coefficients of `(k,m)`:
/// `f = (1-r²) Σ_j g_{j+1} Q_j^{k+1,m} + g_0 Q_0^{k,m}/α`.
///
/// Upper bidiagonal and invertible, so every `f` of length `N` has a unique
/// `g` with `f(1) = g_0`. The columns are those of [`dirichlet_b`] with the
/// `C†` part shifted one place to the right.
pub fn galerkin_b(field: BasisId, n: usize) -> BandedMatrix {
    let src = BasisId::new(field.k + 1, field.m);
    let (sub, diag) = cdag_bands(src, n.saturating_sub(1));
    let mut lead = Vec::with_capacity(n);
    if n > 0 {
        lead.push(1.0 / boundary_values(field, 1)[0]);
        lead.extend(sub);
    }
    BandedMatrix::from_bands(n, n, src, field, [(0, lead), (1, diag)])
}

/// Operator families of the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    Dplus,
    Dminus,
    Rplus,
    Rminus,
    C,
    Cdag,
    Z,
    B,
    Identity,
}

/// An operator family applied to a specific source space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperatorTag {
    pub kind: OperatorKind,
    pub source: BasisId,
}

impl OperatorTag {
    pub const fn new(kind: OperatorKind, source: BasisId) -> Self {
        Self { kind, source }
    }

    /// Target space, with `D⁻`/`R⁻` at `m = 0` mapping to `m = 1`.
    pub fn codomain(&self) -> Result<BasisId> {
        let BasisId { k, m } = self.source;
        Ok(match self.kind {
            OperatorKind::Dplus => BasisId::new(k + 1, m + 1),
            OperatorKind::Dminus => BasisId::new(k + 1, m.abs_diff(1)),
            OperatorKind::Rplus => BasisId::new(k, m + 1),
            OperatorKind::Rminus => BasisId::new(k, m.abs_diff(1)),
            OperatorKind::C => BasisId::new(k + 1, m),
            OperatorKind::Cdag | OperatorKind::B => {
                if k == 0 {
                    return Err(DiskError::LoweringAtZeroK(self.source));
                }
                BasisId::new(k - 1, m)
            }
            OperatorKind::Z | OperatorKind::Identity => self.source,
        })
    }

    /// Builds the `N`-sized operator. `D⁻` at `m = 0` yields `D⁺`.
    pub fn build(&self, n: usize) -> Result<BandedMatrix> {
        let s = self.source;
        Ok(match self.kind {
            OperatorKind::Dplus => d_plus(s, n),
            OperatorKind::Dminus if s.m == 0 => d_plus(s, n),
            OperatorKind::Dminus => d_minus(s, n)?,
            OperatorKind::Rplus => r_plus(s, n),
            OperatorKind::Rminus => r_minus(s, n),
            OperatorKind::C => convert(s, n),
            OperatorKind::Cdag => convert_down(s, n)?,
            OperatorKind::Z => z_matrix(s, n),
            OperatorKind::B => dirichlet_b(s, n)?,
            OperatorKind::Identity => BandedMatrix::identity(n, s),
        })
    }
}

type Cache = RwLock<HashMap<(OperatorTag, usize), Arc<BandedMatrix>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized [`OperatorTag::build`]; safe under concurrent use.
pub fn operator(tag: OperatorTag, n: usize) -> Result<Arc<BandedMatrix>> {
    if let Some(hit) = cache()
        .read()
        .expect("operator cache poisoned")
        .get(&(tag, n))
    {
        return Ok(Arc::clone(hit));
    }
    let built = Arc::new(tag.build(n)?);
    cache()
        .write()
        .expect("operator cache poisoned")
        .insert((tag, n), Arc::clone(&built));
    Ok(built)
}

/// Product of operators listed in application order (the first acts first).
pub fn compose(ops: &[OperatorTag], n: usize) -> Result<BandedMatrix> {
    let Some(first) = ops.first() else {
        return Err(DiskError::Parameter(
            "compose needs at least one operator".into(),
        ));
    };
    let mut acc = (*operator(*first, n)?).clone();
    let mut here = first.codomain()?;
    for tag in &ops[1..] {
        if tag.source != here {
            return Err(DiskError::Composition {
                expected: tag.source,
                found: here,
            });
        }
        let op = operator(*tag, n)?;
        acc = op.product(&acc)?;
        here = tag.codomain()?;
    }
    Ok(acc)
}

/// `D^σ` acting on a component with signed Fourier index `m_signed` at level `k`.
///
/// For negative indices the radial space is `|m|` and the roles of the two
/// operators swap; the result is labelled with the spaces `(k, |m|)` and
/// `(k+1, |m+σ|)`.
pub fn d_signed(sigma: i32, k: u32, m_signed: i64, n: usize) -> BandedMatrix {
    let src = BasisId::signed(k, m_signed);
    let raise = match m_signed.signum() {
        0 => true,
        1 => sigma > 0,
        _ => sigma < 0,
    };
    let op = if raise {
        d_plus(src, n)
    } else {
        d_minus(src, n).expect("lowering only at |m| >= 1")
    };
    let dst = BasisId::signed(k + 1, m_signed + sigma as i64);
    op.with_labels(src, dst)
}

/// `R^σ` acting on a component with signed Fourier index `m_signed`.
pub fn r_signed(sigma: i32, k: u32, m_signed: i64, n: usize) -> BandedMatrix {
    let src = BasisId::signed(k, m_signed);
    let raise = match m_signed.signum() {
        0 => true,
        1 => sigma > 0,
        _ => sigma < 0,
    };
    let op = if raise {
        r_plus(src, n)
    } else {
        r_minus(src, n)
    };
    let dst = BasisId::signed(k, m_signed + sigma as i64);
    op.with_labels(src, dst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(k: u32, m: u32) -> BasisId {
        BasisId::new(k, m)
    }

    #[test]
    fn appendix_entries() {
        assert!((d_plus(s(0, 0), 4).get(0, 1) - 2.0).abs() < 1e-15);
        let dp = d_plus(s(2, 3), 5);
        for i in 0..5 {
            assert_eq!(dp.get(i, 0), 0.0);
        }
        assert!((d_minus(s(0, 1), 3).unwrap().get(0, 0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((d_minus(s(0, 2), 3).unwrap().get(1, 1) - 12f64.sqrt()).abs() < 1e-14);
        assert!((r_plus(s(0, 0), 3).get(0, 0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((convert(s(0, 0), 3).get(0, 0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((convert_down(s(1, 0), 3).unwrap().get(0, 0) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lattice_errors() {
        assert!(matches!(
            d_minus(s(1, 0), 3),
            Err(DiskError::LoweringAtZeroM(_))
        ));
        assert!(matches!(
            convert_down(s(0, 2), 3),
            Err(DiskError::LoweringAtZeroK(_))
        ));
        assert!(matches!(
            dirichlet_b(s(0, 2), 3),
            Err(DiskError::LoweringAtZeroK(_))
        ));
        let bad = [
            OperatorTag::new(OperatorKind::C, s(0, 1)),
            OperatorTag::new(OperatorKind::C, s(0, 1)),
        ];
        match compose(&bad, 4) {
            Err(DiskError::Composition { expected, found }) => {
                assert_eq!(expected, s(0, 1));
                assert_eq!(found, s(1, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_m_substitution() {
        let tag = OperatorTag::new(OperatorKind::Dminus, s(0, 0));
        assert_eq!(tag.codomain().unwrap(), s(1, 1));
        assert_eq!(tag.build(6).unwrap(), d_plus(s(0, 0), 6));
        assert_eq!(r_minus(s(1, 0), 5), r_plus(s(1, 0), 5));
    }

    #[test]
    fn z_matrix_examples() {
        let z = z_matrix(s(0, 0), 6);
        for j in 0..6 {
            assert_eq!(z.get(j, j), 0.0);
        }
        for j in 1..6 {
            let n = j as f64;
            assert!((z.get(j - 1, j) - n / (4.0 * n * n - 1.0).sqrt()).abs() < 1e-15);
        }
        assert!((z_matrix(s(1, 2), 3).get(1, 1) - 3.0 / 35.0).abs() < 1e-15);
    }

    #[test]
    fn z_is_product_form() {
        for (k, m) in [(0, 0), (1, 2), (3, 7), (2, 0)] {
            let src = s(k, m);
            let n = 20;
            let rp = r_plus(src, n);
            let rm = r_minus(rp.codomain(), n);
            let prod = rm.product(&rp).unwrap().scale(2.0);
            let prod = prod.sub(&BandedMatrix::identity(n, src)).unwrap();
            assert!(prod.max_deviation(&z_matrix(src, n), n) < 1e-14, "{src}");
        }
    }

    #[test]
    fn compose_products() {
        let m = 3;
        let lap = compose(
            &[
                OperatorTag::new(OperatorKind::Dplus, s(0, m)),
                OperatorTag::new(OperatorKind::Dminus, s(1, m + 1)),
            ],
            10,
        )
        .unwrap();
        assert_eq!(lap.codomain(), s(2, m));
        assert!(lap.offsets().all(|d| (0..=1).contains(&d)));
        let cc = compose(
            &[
                OperatorTag::new(OperatorKind::C, s(0, m)),
                OperatorTag::new(OperatorKind::C, s(1, m)),
            ],
            10,
        )
        .unwrap();
        assert_eq!(cc.offsets().collect::<Vec<_>>(), vec![0, 1, 2]);
        let x = compose(
            &[
                OperatorTag::new(OperatorKind::Identity, s(0, m)),
                OperatorTag::new(OperatorKind::C, s(0, m)),
            ],
            10,
        )
        .unwrap();
        assert_eq!(x, convert(s(0, m), 10));
    }

    #[test]
    fn signed_operators() {
        let n = 6;
        // D⁺ on a component with index -3 acts as D⁻ on |m| = 3
        let a = d_signed(1, 0, -3, n);
        assert_eq!(a.codomain(), s(1, 2));
        assert_eq!(a.get(0, 0), d_minus(s(0, 3), n).unwrap().get(0, 0));
        let b = d_signed(-1, 0, 0, n);
        assert_eq!(b.codomain(), s(1, 1));
        assert_eq!(b.get(0, 1), d_plus(s(0, 0), n).get(0, 1));
        let c = r_signed(-1, 0, -2, n);
        assert_eq!(c.codomain(), s(0, 3));
        assert_eq!(c, r_plus(s(0, 2), n).with_labels(s(0, 2), s(0, 3)));
    }

    #[test]
    fn cache_is_consistent() {
        let tag = OperatorTag::new(OperatorKind::Rplus, s(2, 5));
        let a = operator(tag, 17).unwrap();
        let b = operator(tag, 17).unwrap();
        assert!(Arc::ptr_eq(&a, &b) || *a == *b);
        let handles: Vec<_> = (0..8)
            .map(|i| {
                std::thread::spawn(move || {
                    operator(OperatorTag::new(OperatorKind::C, s(i % 3, 4)), 12).unwrap()
                })
            })
            .collect();
        for (i, h) in handles.into_iter().enumerate() {
            assert_eq!(*h.join().unwrap(), convert(s(i as u32 % 3, 4), 12));
        }
    }

    #[test]
    fn galerkin_b_localizes_boundary_value() {
        let field = s(0, 2);
        let n = 16;
        let b = galerkin_b(field, n);
        assert_eq!((b.lower_bandwidth(), b.upper_bandwidth()), (0, 1));
        let row = boundary_values(field, n);
        let g: Vec<f64> = (0..n)
            .map(|i| ((i * 7 % 5) as f64 - 2.0) / (1.0 + i as f64))
            .collect();
        let f = b.matvec(&g).unwrap();
        let f1: f64 = row.iter().zip(&f).map(|(a, b)| a * b).sum();
        assert!((f1 - g[0]).abs() < 1e-12);
        let cdag = convert_down(s(1, 2), n).unwrap();
        for j in 1..n - 1 {
            for i in 0..n {
                assert_eq!(b.get(i, j), cdag.get(i, j - 1));
            }
        }
        assert!((0..n).all(|i| b.get(i, i) != 0.0));
    }

    #[test]
    fn literal_b_misses_lowest_bubble() {
        // (1-r²) Q_0^{1,m} is not in the span of the lower-bidiagonal form
        let n = 24;
        let lit = dirichlet_b(s(1, 2), n - 1).unwrap();
        let target = convert_down(s(1, 2), n).unwrap();
        let t: Vec<f64> = (0..n).map(|i| target.get(i, 0)).collect();
        let mut g = vec![0.0; n - 1];
        for i in 0..n - 1 {
            let prev = if i > 0 {
                lit.get(i, i - 1) * g[i - 1]
            } else {
                0.0
            };
            g[i] = (t[i] - prev) / lit.get(i, i);
        }
        let miss = (lit.get(n - 1, n - 2) * g[n - 2] - t[n - 1]).abs();
        assert!(miss > 1e-3, "{miss}");
    }
}
