//! Block systems of banded operators with dense boundary rows.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use num_complex::Complex64;

use crate::bandlinalg::solve::band_solve;
use crate::basis::{lambda_entry, BasisId, RestrictionRow};
use crate::error::{DiskError, Result};
use crate::sparseops::{galerkin_b, BandedMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex linear combination of equally shaped real banded matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    terms: Vec<(Complex64, BandedMatrix)>,
}

impl Block {
    pub fn real(m: BandedMatrix) -> Self {
        Self::scaled(Complex64::new(1.0, 0.0), m)
    }

    pub fn scaled(c: Complex64, m: BandedMatrix) -> Self {
        Self {
            terms: vec![(c, m)],
        }
    }

    /// Appends `c · m`.
    pub fn plus(mut self, c: Complex64, m: BandedMatrix) -> Result<Self> {
        let (r, k) = self.shape();
        if m.shape() != (r, k) {
            return Err(DiskError::Dimension {
                expected: r * k,
                found: m.rows() * m.cols(),
            });
        }
        self.terms.push((c, m));
        Ok(self)
    }

    pub fn terms(&self) -> &[(Complex64, BandedMatrix)] {
        &self.terms
    }

    pub fn shape(&self) -> (usize, usize) {
        self.terms[0].1.shape()
    }

    /// Sum of the terms when every coefficient is real.
    pub fn as_real(&self) -> Option<BandedMatrix> {
        if self.terms.iter().any(|(c, _)| c.im != 0.0) {
            return None;
        }
        let (c0, m0) = &self.terms[0];
        let mut acc = m0.scale(c0.re);
        for (c, m) in &self.terms[1..] {
            acc = acc.axpby(1.0, m, c.re).ok()?;
        }
        Some(acc)
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![ZERO; self.shape().0];
        for (c, m) in &self.terms {
            for (o, y) in out.iter_mut().zip(m.matvec(x)?) {
                *o += c * y;
            }
        }
        Ok(out)
    }

    fn map(&self, f: impl Fn(&BandedMatrix) -> Result<BandedMatrix>) -> Result<Block> {
        let terms = self
            .terms
            .iter()
            .map(|(c, m)| Ok((*c, f(m)?)))
            .collect::<Result<_>>()?;
        Ok(Block { terms })
    }

    fn add_dense(&self, out: &mut Array2<Complex64>, r0: usize, c0: usize) {
        for (c, m) in &self.terms {
            for (i, j, x) in m.entries() {
                out[[r0 + i, c0 + j]] += c * x;
            }
        }
    }
}

/// One unknown field of a block system.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub label: String,
    pub basis: BasisId,
    pub size: usize,
}

impl Field {
    pub fn new(label: impl Into<String>, basis: BasisId, size: usize) -> Self {
        Self {
            label: label.into(),
            basis,
            size,
        }
    }
}

/// A dense boundary condition hosted by one block row.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRow {
    pub block_row: usize,
    /// `(block column, row over that column's coefficients)`.
    pub entries: Vec<(usize, Vec<Complex64>)>,
    pub value: Complex64,
    /// Local row to overwrite; `None` selects the last free row of the block.
    pub row: Option<usize>,
}

impl BoundaryRow {
    pub fn new(block_row: usize, value: Complex64) -> Self {
        Self {
            block_row,
            entries: Vec::new(),
            value,
            row: None,
        }
    }

    /// Adds `coef · row` acting on block column `col`.
    pub fn with_restriction(mut self, col: usize, row: &RestrictionRow, coef: Complex64) -> Self {
        self.entries
            .push((col, row.entries.iter().map(|&x| coef * x).collect()));
        self
    }

    pub fn at_row(mut self, row: usize) -> Self {
        self.row = Some(row);
        self
    }
}

/// Change of variables applied by [`BlockSystem::galerkin_recombine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recombination {
    /// `f = B g`, localizing a value condition to `g_0`.
    Dirichlet,
    /// `f = Λ⁻¹ B g`, localizing a derivative condition to `g_0`.
    General,
}

/// Block pencil `𝓛 Ξ = λ 𝓡 Ξ` or linear system `𝓛 Ξ = F`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem {
    row_sizes: Vec<usize>,
    fields: Vec<Field>,
    lhs: Vec<Vec<Option<Block>>>,
    rhs: Vec<Vec<Option<Block>>>,
    forcing: Vec<Vec<Complex64>>,
    boundary_rows: Vec<BoundaryRow>,
    replaced: BTreeMap<usize, Vec<(usize, Complex64)>>,
    col_maps: Vec<Option<BandedMatrix>>,
}

impl BlockSystem {
    pub fn new(row_sizes: Vec<usize>, fields: Vec<Field>) -> Self {
        let (nr, nc) = (row_sizes.len(), fields.len());
        Self {
            forcing: row_sizes.iter().map(|&n| vec![ZERO; n]).collect(),
            row_sizes,
            lhs: vec![vec![None; nc]; nr],
            rhs: vec![vec![None; nc]; nr],
            col_maps: vec![None; nc],
            fields,
            boundary_rows: Vec::new(),
            replaced: BTreeMap::new(),
        }
    }

    /// Square system whose block rows match the field sizes.
    pub fn square(fields: Vec<Field>) -> Self {
        Self::new(fields.iter().map(|f| f.size).collect(), fields)
    }

    fn check_shape(&self, i: usize, j: usize, b: &Block) -> Result<()> {
        if i >= self.row_sizes.len() || j >= self.fields.len() {
            return Err(DiskError::Placement(format!(
                "block ({i}, {j}) outside the block grid"
            )));
        }
        let want = (self.row_sizes[i], self.fields[j].size);
        if b.shape() != want {
            return Err(DiskError::Dimension {
                expected: want.0 * want.1,
                found: b.shape().0 * b.shape().1,
            });
        }
        Ok(())
    }

    pub fn set_lhs(&mut self, i: usize, j: usize, b: Block) -> Result<()> {
        self.check_shape(i, j, &b)?;
        self.lhs[i][j] = Some(b);
        Ok(())
    }

    pub fn set_rhs(&mut self, i: usize, j: usize, b: Block) -> Result<()> {
        self.check_shape(i, j, &b)?;
        self.rhs[i][j] = Some(b);
        Ok(())
    }

    pub fn set_forcing(&mut self, i: usize, f: Vec<Complex64>) -> Result<()> {
        if f.len() != self.row_sizes[i] {
            return Err(DiskError::Dimension {
                expected: self.row_sizes[i],
                found: f.len(),
            });
        }
        self.forcing[i] = f;
        Ok(())
    }

    pub fn add_boundary_row(&mut self, row: BoundaryRow) {
        self.boundary_rows.push(row);
    }

    pub fn lhs(&self, i: usize, j: usize) -> Option<&Block> {
        self.lhs[i][j].as_ref()
    }

    pub fn rhs(&self, i: usize, j: usize) -> Option<&Block> {
        self.rhs[i][j].as_ref()
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn row_sizes(&self) -> &[usize] {
        &self.row_sizes
    }

    pub fn boundary_rows(&self) -> &[BoundaryRow] {
        &self.boundary_rows
    }

    /// Global rows overwritten by inserted boundary conditions.
    pub fn replaced_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.replaced.keys().copied()
    }

    pub fn total_rows(&self) -> usize {
        self.row_sizes.iter().sum()
    }

    pub fn total_cols(&self) -> usize {
        self.fields.iter().map(|f| f.size).sum()
    }

    fn row_offset(&self, i: usize) -> usize {
        self.row_sizes[..i].iter().sum()
    }

    fn col_offset(&self, j: usize) -> usize {
        self.fields[..j].iter().map(|f| f.size).sum()
    }

    /// Writes the pending boundary rows into `𝓛`, zeroes the matching `𝓡`
    /// rows and places the boundary values in the forcing.
    pub fn insert_boundary_rows(mut self) -> Result<Self> {
        let pending = std::mem::take(&mut self.boundary_rows);
        let mut from_end = vec![0usize; self.row_sizes.len()];
        for bc in pending {
            let h = bc.block_row;
            if h >= self.row_sizes.len() {
                return Err(DiskError::Placement(format!(
                    "block row {h} does not exist"
                )));
            }
            let size = self.row_sizes[h];
            let local = match bc.row {
                Some(r) => r,
                None => {
                    from_end[h] += 1;
                    size.checked_sub(from_end[h]).ok_or_else(|| {
                        DiskError::Placement(format!("block row {h} has no free row left"))
                    })?
                }
            };
            if local >= size {
                return Err(DiskError::Placement(format!(
                    "row {local} outside block row {h} of size {size}"
                )));
            }
            let global = self.row_offset(h) + local;
            if self.replaced.contains_key(&global) {
                return Err(DiskError::Placement(format!(
                    "row {local} of block row {h} already replaced"
                )));
            }
            let mut entries = Vec::new();
            for (col, row) in &bc.entries {
                let Some(field) = self.fields.get(*col) else {
                    return Err(DiskError::Placement(format!(
                        "boundary row references missing field {col}"
                    )));
                };
                if row.len() != field.size {
                    return Err(DiskError::Placement(format!(
                        "boundary row over field '{}' has length {}, expected {}",
                        field.label,
                        row.len(),
                        field.size
                    )));
                }
                let c0 = self.col_offset(*col);
                entries.extend(
                    row.iter()
                        .enumerate()
                        .filter(|(_, x)| **x != ZERO)
                        .map(|(j, &x)| (c0 + j, x)),
                );
            }
            self.replaced.insert(global, entries);
            self.forcing[h][local] = bc.value;
        }
        Ok(self)
    }

    /// Rewrites `fields` in recombined variables so that each field's
    /// boundary condition reduces to its first coefficient.
    ///
    /// The hosting block row drops its last row, as row replacement would,
    /// and shifts the rest down by one so the boundary row sits at local
    /// row 0 and the system stays banded.
    pub fn galerkin_recombine(mut self, which: &[usize], kind: Recombination) -> Result<Self> {
        let mut hosts = Vec::new();
        for &c in which {
            let field = self
                .fields
                .get(c)
                .cloned()
                .ok_or_else(|| DiskError::Placement(format!("field {c} does not exist")))?;
            let bi = self
                .boundary_rows
                .iter()
                .position(|b| b.row.is_none() && b.entries.iter().any(|(col, _)| *col == c))
                .ok_or_else(|| {
                    DiskError::Placement(format!(
                        "no boundary row constrains field '{}'",
                        field.label
                    ))
                })?;
            let h = self.boundary_rows[bi].block_row;
            if hosts.contains(&h) {
                return Err(DiskError::Placement(format!(
                    "block row {h} already hosts a recombined condition"
                )));
            }
            hosts.push(h);
            let n = field.size;
            if n < 2 || self.row_sizes[h] < 2 {
                return Err(DiskError::Placement(format!(
                    "field '{}' too short to recombine",
                    field.label
                )));
            }
            let b = field.basis;
            let mut map = galerkin_b(b, n);
            if kind == Recombination::General {
                if lambda_entry(b, 0) == 0.0 {
                    return Err(DiskError::GaugeRequired(b));
                }
                let inv = (0..n).map(|i| 1.0 / lambda_entry(b, i)).collect();
                map = BandedMatrix::from_bands(n, n, b, b, [(0, inv)]).product(&map)?;
            }

            for i in 0..self.row_sizes.len() {
                for grid in [&mut self.lhs, &mut self.rhs] {
                    if let Some(blk) = &grid[i][c] {
                        grid[i][c] = Some(blk.map(|m| m.product_unchecked(&map))?);
                    }
                }
            }
            self.col_maps[c] = Some(match self.col_maps[c].take() {
                Some(prev) => prev.product_unchecked(&map)?,
                None => map.clone(),
            });

            let rows = self.row_sizes[h];
            for j in 0..self.fields.len() {
                for grid in [&mut self.lhs, &mut self.rhs] {
                    if let Some(blk) = &grid[h][j] {
                        grid[h][j] = Some(blk.map(|m| Ok(shift_down(m)))?);
                    }
                }
            }
            let f = &mut self.forcing[h];
            f.truncate(rows - 1);
            f.insert(0, ZERO);

            for bc in &mut self.boundary_rows {
                for (col, row) in &mut bc.entries {
                    if *col == c {
                        *row = recombine_row(row, &map);
                    }
                }
            }
            self.boundary_rows[bi].row = Some(0);
        }
        Ok(self)
    }

    /// Dense `𝓛` with boundary rows applied.
    pub fn dense_lhs(&self) -> Array2<Complex64> {
        let mut a = self.assemble(&self.lhs);
        for (&r, entries) in &self.replaced {
            a.row_mut(r).fill(ZERO);
            for &(c, x) in entries {
                a[[r, c]] = x;
            }
        }
        a
    }

    /// Dense `𝓡` with boundary rows zeroed.
    pub fn dense_rhs(&self) -> Array2<Complex64> {
        let mut a = self.assemble(&self.rhs);
        for &r in self.replaced.keys() {
            a.row_mut(r).fill(ZERO);
        }
        a
    }

    fn assemble(&self, grid: &[Vec<Option<Block>>]) -> Array2<Complex64> {
        let mut a = Array2::zeros((self.total_rows(), self.total_cols()));
        for (i, row) in grid.iter().enumerate() {
            let r0 = self.row_offset(i);
            for (j, blk) in row.iter().enumerate() {
                if let Some(b) = blk {
                    b.add_dense(&mut a, r0, self.col_offset(j));
                }
            }
        }
        a
    }

    pub fn forcing_vector(&self) -> Vec<Complex64> {
        self.forcing.iter().flatten().copied().collect()
    }

    /// `𝓛 x` without dense assembly.
    pub fn apply_lhs(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.total_cols() {
            return Err(DiskError::Dimension {
                expected: self.total_cols(),
                found: x.len(),
            });
        }
        let mut y = vec![ZERO; self.total_rows()];
        for (i, row) in self.lhs.iter().enumerate() {
            let r0 = self.row_offset(i);
            for (j, blk) in row.iter().enumerate() {
                if let Some(b) = blk {
                    let c0 = self.col_offset(j);
                    let part = b.apply(&x[c0..c0 + self.fields[j].size])?;
                    for (o, v) in y[r0..].iter_mut().zip(part) {
                        *o += v;
                    }
                }
            }
        }
        for (&r, entries) in &self.replaced {
            y[r] = entries.iter().map(|&(c, v)| v * x[c]).sum();
        }
        Ok(y)
    }

    /// Real banded `𝓛` of a single-field system, boundary rows included.
    pub fn to_banded(&self) -> Result<BandedMatrix> {
        if self.fields.len() != 1 || self.row_sizes.len() != 1 {
            return Err(DiskError::Placement(
                "banded form needs a single block".into(),
            ));
        }
        let (n, b) = (self.row_sizes[0], self.fields[0].basis);
        let mut a = match &self.lhs[0][0] {
            Some(blk) => blk.as_real().ok_or_else(|| {
                DiskError::Parameter("banded form needs real coefficients".into())
            })?,
            None => BandedMatrix::zeros(n, self.fields[0].size, b, b),
        };
        for (&r, entries) in &self.replaced {
            for j in 0..a.cols() {
                if a.get(r, j) != 0.0 {
                    a.set(r, j, 0.0);
                }
            }
            for &(c, x) in entries {
                if x.im != 0.0 {
                    return Err(DiskError::Parameter(
                        "banded form needs real boundary rows".into(),
                    ));
                }
                a.set(r, c, x.re);
            }
        }
        Ok(a.prune())
    }

    /// Splits a stacked solution into fields and maps recombined fields back
    /// to their original coefficients.
    pub fn unpack(&self, x: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        let mut out = Vec::with_capacity(self.fields.len());
        let mut c0 = 0;
        for (f, map) in self.fields.iter().zip(&self.col_maps) {
            let part = &x[c0..c0 + f.size];
            out.push(match map {
                Some(m) => m.matvec(part)?,
                None => part.to_vec(),
            });
            c0 += f.size;
        }
        Ok(out)
    }

    /// Solves `𝓛 x = F`, banded for a single real block and dense otherwise.
    /// Returns the stacked unknowns in the system's own variables.
    pub fn solve_raw(&self) -> Result<Vec<Complex64>> {
        if !self.boundary_rows.is_empty() {
            return Err(DiskError::Placement(
                "boundary rows must be inserted before solving".into(),
            ));
        }
        let f = self.forcing_vector();
        if let Ok(a) = self.to_banded() {
            return band_solve(&a, &f);
        }
        if self.total_rows() != self.total_cols() {
            return Err(DiskError::Dimension {
                expected: self.total_cols(),
                found: self.total_rows(),
            });
        }
        let a = self.dense_lhs();
        a.solve(&Array1::from(f))
            .map(|x| x.to_vec())
            .map_err(|e| match e {
                ndarray_linalg::error::LinalgError::Lapack(
                    lax::error::Error::LapackComputationalFailure { return_code },
                ) => DiskError::Singular(return_code.max(1) as usize - 1),
                other => DiskError::Parameter(other.to_string()),
            })
    }

    /// Solves `𝓛 x = F` and returns each field in its original variables.
    pub fn solve(&self) -> Result<Vec<Vec<Complex64>>> {
        self.unpack(&self.solve_raw()?)
    }
}

fn shift_down(m: &BandedMatrix) -> BandedMatrix {
    let rows = m.rows();
    let mut out = BandedMatrix::zeros(rows, m.cols(), m.domain(), m.codomain());
    for (i, j, x) in m.entries() {
        if i + 1 < rows && x != 0.0 {
            out.set(i + 1, j, x);
        }
    }
    out.prune()
}

fn recombine_row(row: &[Complex64], map: &BandedMatrix) -> Vec<Complex64> {
    let mut out = vec![ZERO; map.cols()];
    for (i, j, x) in map.entries() {
        out[j] += row[i] * x;
    }
    let lead = out[0].norm();
    if lead > 0.0 && out[1..].iter().all(|v| v.norm() <= 1e-10 * lead) {
        for v in &mut out[1..] {
            *v = ZERO;
        }
    }
    out
}
