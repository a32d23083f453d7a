//! Compressed-row complex matrices and the basis-tagged Hermitian operator
//! type that every Hamiltonian in the crate is expressed in.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64, ZERO};

/// Rows above which matrix-vector products are split across threads.
const PARALLEL_ROWS: usize = 4096;

/// Tolerance for the entrywise Hermiticity check at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Assemble from coordinate triplets. Duplicates are summed and entries
    /// that cancel to exactly zero are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, C64)>,
    ) -> Self {
        triplets.par_sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows_of: Vec<usize> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(
                r < nrows && c < ncols,
                "triplet ({r},{c}) outside {nrows}x{ncols}"
            );
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                rows_of.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for ((c, v), r) in indices.into_iter().zip(values).zip(rows_of) {
            if v != ZERO {
                keep_idx.push(c);
                keep_val.push(v);
                indptr[r + 1] += 1;
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices: keep_idx,
            values: keep_val,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_triplets(nrows, ncols, Vec::new())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let t = diag
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, i, C64::new(d, 0.0)))
            .collect();
        Self::from_triplets(diag.len(), diag.len(), t)
    }

    pub fn from_dense(m: &CMat) -> Self {
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != ZERO {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b]
            .iter()
            .copied()
            .zip(self.values[a..b].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[a..b].binary_search(&j) {
            Ok(k) => self.values[a + k],
            Err(_) => ZERO,
        }
    }

    /// All stored entries in (row, col) order.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            out.extend(self.row(i).map(|(j, v)| (i, j, v)));
        }
        out
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.nrows).all(|i| self.row(i).all(|(j, _)| j == i))
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols);
        let row = |i: usize| self.row(i).map(|(j, v)| v * x[j]).sum::<C64>();
        if self.nrows >= PARALLEL_ROWS {
            (0..self.nrows).into_par_iter().map(row).collect()
        } else {
            (0..self.nrows).map(row).collect()
        }
    }

    pub fn matvec_dense(&self, x: &CVec) -> CVec {
        CVec::from_vec(self.matvec(x.as_slice()))
    }

    pub fn adjoint(&self) -> Self {
        let t = self
            .triplets()
            .into_iter()
            .map(|(i, j, v)| (j, i, v.conj()))
            .collect();
        Self::from_triplets(self.ncols, self.nrows, t)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = self.triplets();
        t.extend(other.triplets());
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Sparse-sparse product, row by row with an ordered accumulator.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let rows: Vec<Vec<(usize, usize, C64)>> = (0..self.nrows)
            .into_par_iter()
            .map(|i| {
                let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
                for (k, a) in self.row(i) {
                    for (j, b) in other.row(k) {
                        *acc.entry(j).or_insert(ZERO) += a * b;
                    }
                }
                acc.into_iter().map(|(j, v)| (i, j, v)).collect()
            })
            .collect();
        Self::from_triplets(
            self.nrows,
            other.ncols,
            rows.into_iter().flatten().collect(),
        )
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Principal submatrix on the listed indices, in the listed order.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.ncols];
        for (new, &old) in keep.iter().enumerate() {
            pos[old] = new;
        }
        let mut t = Vec::new();
        for (new_i, &old_i) in keep.iter().enumerate() {
            for (j, v) in self.row(old_i) {
                if pos[j] != usize::MAX {
                    t.push((new_i, pos[j], v));
                }
            }
        }
        Self::from_triplets(keep.len(), keep.len(), t)
    }

    /// Largest entry of the block with rows in `rows` and columns outside it.
    pub fn off_block_max(&self, rows: &[bool]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                if rows[i] != rows[j] {
                    worst = worst.max(v.norm());
                }
            }
        }
        worst
    }
}

/// Describes the ordered basis an operator is written in. Operators with
/// different tags refuse to be combined.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisTag(pub String);

impl BasisTag {
    pub fn new(s: impl Into<String>) -> Self {
        BasisTag(s.into())
    }
}

impl std::fmt::Display for BasisTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone)]
pub struct SparseHermitian {
    matrix: CsrMatrix,
    basis: BasisTag,
}

impl SparseHermitian {
    pub fn new(matrix: CsrMatrix, basis: BasisTag) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::OutOfRange(format!(
                "non-square operator {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let err = matrix.sub(&matrix.adjoint()).max_abs();
        if err > HERMITIAN_TOL {
            return Err(Error::NonHermitian(err));
        }
        Ok(SparseHermitian { matrix, basis })
    }

    pub fn from_triplets(
        dim: usize,
        triplets: Vec<(usize, usize, C64)>,
        basis: BasisTag,
    ) -> Result<Self> {
        Self::new(CsrMatrix::from_triplets(dim, dim, triplets), basis)
    }

    pub fn from_dense(m: &CMat, basis: BasisTag) -> Result<Self> {
        Self::new(CsrMatrix::from_dense(m), basis)
    }

    pub fn from_diagonal(diag: &[f64], basis: BasisTag) -> Self {
        SparseHermitian {
            matrix: CsrMatrix::from_diagonal(diag),
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis(&self) -> &BasisTag {
        &self.basis
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn with_basis(mut self, basis: BasisTag) -> Self {
        self.basis = basis;
        self
    }

    pub fn is_real(&self) -> bool {
        self.matrix.is_real()
    }

    pub fn to_dense(&self) -> CMat {
        self.matrix.to_dense()
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        self.matrix.matvec(x)
    }

    pub fn expectation(&self, psi: &CVec) -> f64 {
        let hpsi = self.matrix.matvec_dense(psi);
        psi.dotc(&hpsi).re
    }

    fn same_basis(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis || self.dim() != other.dim() {
            return Err(Error::BasisMismatch {
                left: format!("{} (dim {})", self.basis, self.dim()),
                right: format!("{} (dim {})", other.basis, other.dim()),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(SparseHermitian {
            matrix: self.matrix.add(&other.matrix),
            basis: self.basis.clone(),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        SparseHermitian {
            matrix: self.matrix.scale(C64::new(s, 0.0)),
            basis: self.basis.clone(),
        }
    }

    /// The anti-Hermitian commutator `[self, other]` as a general matrix.
    pub fn commutator(&self, other: &Self) -> Result<CsrMatrix> {
        self.same_basis(other)?;
        Ok(self
            .matrix
            .mul(&other.matrix)
            .sub(&other.matrix.mul(&self.matrix)))
    }

    /// Frobenius norm of the commutator; an upper bound on its spectral norm.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        Ok(self.commutator(other)?.frobenius())
    }

    pub fn restrict(&self, keep: &[usize], basis: BasisTag) -> Self {
        SparseHermitian {
            matrix: self.matrix.restrict(keep),
            basis,
        }
    }

    /// Entrywise maximum difference to another operator on the same basis.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        self.same_basis(other)?;
        Ok(self.matrix.sub(&other.matrix).max_abs())
    }

    /// Coordinate-list text: a dimension line, then `row col re im` per
    /// stored entry sorted by (row, col).
    pub fn to_coo_string(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.dim()).unwrap();
        for (i, j, v) in self.matrix.triplets() {
            writeln!(s, "{i} {j} {:.17e} {:.17e}", v.re, v.im).unwrap();
        }
        s
    }

    pub fn from_coo_str(text: &str, basis: BasisTag) -> Result<Self> {
        let mut lines = text.lines();
        let dim: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty coordinate file".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("dimension line: {e}")))?;
        let mut t = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.is_empty() {
                continue;
            }
            if f.len() != 4 {
                return Err(Error::Parse(format!(
                    "line {}: expected 4 fields",
                    lineno + 2
                )));
            }
            let p = |k: usize| -> Result<f64> {
                f[k].parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))
            };
            let i = p(0)? as usize;
            let j = p(1)? as usize;
            if i >= dim || j >= dim {
                return Err(Error::Parse(format!(
                    "line {}: index out of range",
                    lineno + 2
                )));
            }
            t.push((i, j, C64::new(p(2)?, p(3)?)));
        }
        Self::from_triplets(dim, t, basis)
    }
}
