//! Banded LU factorization with partial pivoting.

use crate::error::{DiskError, Result};
use crate::scalar::Scalar;
use crate::sparseops::BandedMatrix;

/// LU factors of a square banded matrix, stored row by row.
///
/// Row `i` keeps columns `i - kl ..= i + kl + ku`; the extra `kl` upper
/// diagonals absorb fill-in from row interchanges.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &BandedMatrix) -> Result<Self> {
        let (n, cols) = a.shape();
        if n != cols {
            return Err(DiskError::Dimension {
                expected: n,
                found: cols,
            });
        }
        let kl = a.lower_bandwidth();
        let ku = a.upper_bandwidth();
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
            piv: vec![0; n],
        };
        let mut scale: f64 = 0.0;
        for (i, j, x) in a.entries() {
            *lu.at(i, j) = x;
            scale = scale.max(x.abs());
        }
        let tiny = scale * f64::EPSILON * n as f64 * 1e-3;
        for i in 0..n {
            let last_row = (i + kl).min(n - 1);
            let last_col = (i + kl + ku).min(n - 1);
            let mut p = i;
            let mut best = lu.get(i, i).abs();
            for r in i + 1..=last_row {
                let v = lu.get(r, i).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best.is_nan() || best <= tiny {
                return Err(DiskError::Singular(i));
            }
            lu.piv[i] = p;
            if p != i {
                for j in i..=last_col {
                    let t = lu.get(i, j);
                    *lu.at(i, j) = lu.get(p, j);
                    *lu.at(p, j) = t;
                }
            }
            let pivot = lu.get(i, i);
            for r in i + 1..=last_row {
                let l = lu.get(r, i) / pivot;
                *lu.at(r, i) = l;
                if l == 0.0 {
                    continue;
                }
                for j in i + 1..=last_col {
                    let u = lu.get(i, j);
                    *lu.at(r, j) -= l * u;
                }
            }
        }
        Ok(lu)
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve<T: Scalar>(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        if b.len() != n {
            return Err(DiskError::Dimension {
                expected: n,
                found: b.len(),
            });
        }
        let mut x = b.to_vec();
        for i in 0..n {
            x.swap(i, self.piv[i]);
            let xi = x[i];
            for r in i + 1..=(i + self.kl).min(n.saturating_sub(1)) {
                let l = self.get(r, i);
                x[r] -= xi * l;
            }
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..=(i + self.kl + self.ku).min(n - 1) {
                acc -= x[j] * self.get(i, j);
            }
            x[i] = acc * (1.0 / self.get(i, i));
        }
        Ok(x)
    }
}

/// Solves `A x = b` for square banded `A`.
pub fn band_solve<T: Scalar>(a: &BandedMatrix, b: &[T]) -> Result<Vec<T>> {
    BandLu::factor(a)?.solve(b)
}
