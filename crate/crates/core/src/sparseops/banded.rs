//! Diagonal-major storage for narrow-band rectangular operators.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ndarray::Array2;

use crate::basis::BasisId;
use crate::error::{DiskError, Result};
use crate::scalar::Scalar;

/// Rectangular operator stored by diagonals.
///
/// Band `d` holds the entries `(i, i + d)`; positive offsets are above the
/// main diagonal. Entry `i - i0(d)` of a band corresponds to row `i`, where
/// `i0(d) = max(0, -d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    rows: usize,
    cols: usize,
    bands: BTreeMap<isize, Vec<f64>>,
    domain: BasisId,
    codomain: BasisId,
}

impl BandedMatrix {
    pub fn zeros(rows: usize, cols: usize, domain: BasisId, codomain: BasisId) -> Self {
        Self {
            rows,
            cols,
            bands: BTreeMap::new(),
            domain,
            codomain,
        }
    }

    pub fn identity(n: usize, basis: BasisId) -> Self {
        Self::from_bands(n, n, basis, basis, [(0, vec![1.0; n])])
    }

    /// Builds from `(offset, values)` pairs; each band is truncated or
    /// zero-padded to the length that fits the rectangle.
    pub fn from_bands<I>(
        rows: usize,
        cols: usize,
        domain: BasisId,
        codomain: BasisId,
        bands: I,
    ) -> Self
    where
        I: IntoIterator<Item = (isize, Vec<f64>)>,
    {
        let mut out = Self::zeros(rows, cols, domain, codomain);
        for (d, mut v) in bands {
            let len = out.band_len(d);
            if len == 0 {
                continue;
            }
            v.resize(len, 0.0);
            out.bands.insert(d, v);
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn domain(&self) -> BasisId {
        self.domain
    }

    pub fn codomain(&self) -> BasisId {
        self.codomain
    }

    /// Relabels the lattice endpoints without touching the entries.
    pub fn with_labels(mut self, domain: BasisId, codomain: BasisId) -> Self {
        self.domain = domain;
        self.codomain = codomain;
        self
    }

    fn row_range(&self, d: isize) -> (usize, usize) {
        let i0 = if d < 0 { (-d) as usize } else { 0 };
        let i1 = if d >= 0 {
            self.rows.min(self.cols.saturating_sub(d as usize))
        } else {
            self.rows.min(self.cols + (-d) as usize)
        };
        (i0, i1.max(i0))
    }

    fn band_len(&self, d: isize) -> usize {
        let (i0, i1) = self.row_range(d);
        i1 - i0
    }

    /// Offsets of the stored bands in increasing order.
    pub fn offsets(&self) -> impl Iterator<Item = isize> + '_ {
        self.bands.keys().copied()
    }

    /// Band values with the row of the first entry.
    pub fn band(&self, d: isize) -> Option<(usize, &[f64])> {
        self.bands
            .get(&d)
            .map(|v| (self.row_range(d).0, v.as_slice()))
    }

    /// Number of stored sub-diagonals.
    pub fn lower_bandwidth(&self) -> usize {
        self.bands
            .keys()
            .next()
            .map_or(0, |&d| (-d).max(0) as usize)
    }

    /// Number of stored super-diagonals.
    pub fn upper_bandwidth(&self) -> usize {
        self.bands
            .keys()
            .next_back()
            .map_or(0, |&d| d.max(0) as usize)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.rows || j >= self.cols {
            return 0.0;
        }
        let d = j as isize - i as isize;
        match self.bands.get(&d) {
            Some(v) => v[i - self.row_range(d).0],
            None => 0.0,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i}, {j}) outside {}x{}",
            self.rows,
            self.cols
        );
        let d = j as isize - i as isize;
        let (i0, _) = self.row_range(d);
        let len = self.band_len(d);
        self.bands.entry(d).or_insert_with(|| vec![0.0; len])[i - i0] = value;
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.bands.iter().flat_map(move |(&d, v)| {
            let i0 = self.row_range(d).0;
            v.iter()
                .enumerate()
                .map(move |(p, &x)| (i0 + p, (i0 as isize + p as isize + d) as usize, x))
        })
    }

    pub fn matvec<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(DiskError::Dimension {
                expected: self.cols,
                found: x.len(),
            });
        }
        let mut y = vec![T::zero(); self.rows];
        for (&d, v) in &self.bands {
            let i0 = self.row_range(d).0;
            for (p, &a) in v.iter().enumerate() {
                let i = i0 + p;
                let j = (i as isize + d) as usize;
                y[i] += x[j] * a;
            }
        }
        Ok(y)
    }

    /// `self · rhs`, i.e. `rhs` acts first.
    pub fn product(&self, rhs: &BandedMatrix) -> Result<BandedMatrix> {
        if self.domain != rhs.codomain {
            return Err(DiskError::Composition {
                expected: self.domain,
                found: rhs.codomain,
            });
        }
        self.product_unchecked(rhs)
    }

    /// Product that only checks shapes, for operators whose labels are
    /// deliberately relabelled (signed spin components).
    pub fn product_unchecked(&self, rhs: &BandedMatrix) -> Result<BandedMatrix> {
        if self.cols != rhs.rows {
            return Err(DiskError::Dimension {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = BandedMatrix::zeros(self.rows, rhs.cols, rhs.domain, self.codomain);
        for (&d1, v1) in &self.bands {
            let a0 = self.row_range(d1).0;
            for (&d2, v2) in &rhs.bands {
                let b0 = rhs.row_range(d2).0;
                let d = d1 + d2;
                let len = out.band_len(d);
                if len == 0 {
                    continue;
                }
                let c0 = out.row_range(d).0;
                let target = out.bands.entry(d).or_insert_with(|| vec![0.0; len]);
                for (p, &a) in v1.iter().enumerate() {
                    let i = a0 + p;
                    let l = (i as isize + d1) as usize;
                    if l < b0 || l - b0 >= v2.len() {
                        continue;
                    }
                    let j = l as isize + d2;
                    if j < 0 || j as usize >= out.cols {
                        continue;
                    }
                    target[i - c0] += a * v2[l - b0];
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BandedMatrix {
        let mut out = BandedMatrix::zeros(self.cols, self.rows, self.codomain, self.domain);
        for (&d, v) in &self.bands {
            let i0 = self.row_range(d).0;
            let nd = -d;
            let len = out.band_len(nd);
            let j0 = out.row_range(nd).0;
            let mut nv = vec![0.0; len];
            for (p, &x) in v.iter().enumerate() {
                let j = (i0 as isize + p as isize + d) as usize;
                nv[j - j0] = x;
            }
            out.bands.insert(nd, nv);
        }
        out
    }

    /// `a·self + b·other`; shapes and lattice labels must agree.
    pub fn axpby(&self, a: f64, other: &BandedMatrix, b: f64) -> Result<BandedMatrix> {
        if self.shape() != other.shape() {
            return Err(DiskError::Dimension {
                expected: self.rows,
                found: other.rows,
            });
        }
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(DiskError::Composition {
                expected: self.codomain,
                found: other.codomain,
            });
        }
        let mut out = self.scale(a);
        for (&d, v) in &other.bands {
            let len = out.band_len(d);
            let t = out.bands.entry(d).or_insert_with(|| vec![0.0; len]);
            for (x, &y) in t.iter_mut().zip(v) {
                *x += b * y;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &BandedMatrix) -> Result<BandedMatrix> {
        self.axpby(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &BandedMatrix) -> Result<BandedMatrix> {
        self.axpby(1.0, other, -1.0)
    }

    pub fn scale(&self, a: f64) -> BandedMatrix {
        let mut out = self.clone();
        for v in out.bands.values_mut() {
            for x in v.iter_mut() {
                *x *= a;
            }
        }
        out
    }

    /// Leading `rows × cols` section.
    pub fn section(&self, rows: usize, cols: usize) -> BandedMatrix {
        let mut out = BandedMatrix::zeros(rows, cols, self.domain, self.codomain);
        for (i, j, x) in self.entries() {
            if i < rows && j < cols {
                out.set(i, j, x);
            }
        }
        out
    }

    /// Removes bands whose entries are all exactly zero.
    pub fn prune(mut self) -> BandedMatrix {
        self.bands.retain(|_, v| v.iter().any(|&x| x != 0.0));
        self
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.rows, self.cols));
        for (i, j, x) in self.entries() {
            a[[i, j]] = x;
        }
        a
    }

    /// CSV dump with header `row,col,value` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,value\n");
        let mut all: Vec<_> = self.entries().filter(|e| e.2 != 0.0).collect();
        all.sort_by_key(|&(i, j, _)| (i, j));
        for (i, j, x) in all {
            let _ = writeln!(s, "{i},{j},{}", format_sig17(x));
        }
        s
    }

    /// Largest entrywise difference on the leading `cols` columns.
    pub fn max_deviation(&self, other: &BandedMatrix, cols: usize) -> f64 {
        let rows = self.rows.max(other.rows);
        let mut worst: f64 = 0.0;
        let offsets: std::collections::BTreeSet<isize> =
            self.offsets().chain(other.offsets()).collect();
        for d in offsets {
            for i in 0..rows {
                let j = i as isize + d;
                if j < 0 || j as usize >= cols {
                    continue;
                }
                let j = j as usize;
                worst = worst.max((self.get(i, j) - other.get(i, j)).abs());
            }
        }
        worst
    }
}

/// Formats with 17 significant digits in scientific notation.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}
