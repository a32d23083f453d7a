//! Sums of products of single-qubit operators, realized on the full qubit
//! space or on a subset of computational basis states.
//!
//! Qubit 1 is the most significant bit of a basis index, `Z|0> = |0>`,
//! `sigma^+ = |1><0|` and `sigma^- = |0><1|`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::sparse::{BasisTag, CsrMatrix, SparseHermitian};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    X,
    Y,
    Z,
    /// `sigma^+ = |1><0|`
    Plus,
    /// `sigma^- = |0><1|`
    Minus,
    /// `|0><0|`
    P0,
    /// `|1><1|`, equal to `sigma^+ sigma^-`
    P1,
}

impl Site {
    /// Image of computational state `b` as `(b', amplitude)`, or `None` when
    /// the operator annihilates it.
    fn act(self, b: usize) -> Option<(usize, C64)> {
        let one = C64::new(1.0, 0.0);
        match (self, b) {
            (Site::X, _) => Some((1 - b, one)),
            (Site::Y, 0) => Some((1, C64::new(0.0, 1.0))),
            (Site::Y, _) => Some((0, C64::new(0.0, -1.0))),
            (Site::Z, 0) => Some((0, one)),
            (Site::Z, _) => Some((1, -one)),
            (Site::Plus, 0) => Some((1, one)),
            (Site::Minus, 1) => Some((0, one)),
            (Site::P0, 0) => Some((0, one)),
            (Site::P1, 1) => Some((1, one)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
struct Product {
    coeff: C64,
    /// Written left to right; the rightmost factor acts first.
    factors: Vec<(usize, Site)>,
}

#[derive(Debug, Clone)]
pub struct SpinOp {
    n: usize,
    terms: Vec<Product>,
}

impl SpinOp {
    pub fn new(n: usize) -> Self {
        SpinOp {
            n,
            terms: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Add `coeff * f_1 f_2 ...` with 1-based qubit labels.
    pub fn add(&mut self, coeff: C64, factors: &[(usize, Site)]) -> &mut Self {
        assert!(
            factors.iter().all(|&(q, _)| q >= 1 && q <= self.n),
            "qubit out of range"
        );
        self.terms.push(Product {
            coeff,
            factors: factors.to_vec(),
        });
        self
    }

    pub fn add_real(&mut self, coeff: f64, factors: &[(usize, Site)]) -> &mut Self {
        self.add(C64::new(coeff, 0.0), factors)
    }

    pub fn constant(&mut self, c: f64) -> &mut Self {
        self.add_real(c, &[])
    }

    pub fn extend(&mut self, other: &SpinOp) -> &mut Self {
        assert_eq!(self.n, other.n);
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    /// `O|z>` as a list of `(z', amplitude)`.
    pub fn apply(&self, z: usize) -> Vec<(usize, C64)> {
        let mut out = Vec::new();
        'term: for p in &self.terms {
            let mut w = z;
            let mut amp = p.coeff;
            for &(q, s) in p.factors.iter().rev() {
                let shift = self.n - q;
                match s.act((w >> shift) & 1) {
                    Some((b, a)) => {
                        w = (w & !(1 << shift)) | (b << shift);
                        amp *= a;
                    }
                    None => continue 'term,
                }
            }
            out.push((w, amp));
        }
        out
    }

    /// Matrix on the listed basis states. Amplitude leaking outside the list
    /// is an error, since the restriction would not be an invariant block.
    pub fn matrix_on(&self, states: &[usize]) -> Result<CsrMatrix> {
        let index: HashMap<usize, usize> =
            states.iter().enumerate().map(|(i, &z)| (z, i)).collect();
        let cols: Vec<Result<Vec<(usize, usize, C64)>>> = states
            .par_iter()
            .enumerate()
            .map(|(j, &z)| {
                // Individual products (X X, Y Y) may leave the sector while
                // their sum does not, so leakage is judged on the net image.
                let mut image: HashMap<usize, C64> = HashMap::new();
                for (w, a) in self.apply(z) {
                    *image.entry(w).or_default() += a;
                }
                image
                    .into_iter()
                    .filter(|(_, a)| a.norm() > 1e-14)
                    .map(|(w, a)| {
                        index.get(&w).map(|&i| (i, j, a)).ok_or_else(|| {
                            Error::OutOfRange(format!("operator leaves the sector at state {w:b}"))
                        })
                    })
                    .collect()
            })
            .collect();
        let mut t = Vec::new();
        for c in cols {
            t.extend(c?);
        }
        Ok(CsrMatrix::from_triplets(states.len(), states.len(), t))
    }

    pub fn full_matrix(&self) -> CsrMatrix {
        let states: Vec<usize> = (0..1usize << self.n).collect();
        self.matrix_on(&states).expect("full space is closed")
    }

    pub fn hermitian_on(&self, states: &[usize], tag: BasisTag) -> Result<SparseHermitian> {
        SparseHermitian::new(self.matrix_on(states)?, tag)
    }
}

/// Computational states with `n/2` ones, ascending.
pub fn balanced_sector(n: usize) -> Vec<usize> {
    (0usize..1 << n)
        .filter(|z| z.count_ones() as usize * 2 == n)
        .collect()
}

pub fn sector_tag(n: usize) -> BasisTag {
    BasisTag::new(format!("balanced(n={n})"))
}

pub fn full_tag(n: usize) -> BasisTag {
    BasisTag::new(format!("qubits(n={n})"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raising_and_projectors() {
        let mut op = SpinOp::new(2);
        op.add_real(1.0, &[(1, Site::Plus), (2, Site::Minus)]);
        // |01> -> |10>
        assert_eq!(op.apply(0b01), vec![(0b10, C64::new(1.0, 0.0))]);
        assert!(op.apply(0b10).is_empty());
        let mut p = SpinOp::new(1);
        p.add_real(1.0, &[(1, Site::Plus), (1, Site::Minus)]);
        assert_eq!(p.apply(1), vec![(1, C64::new(1.0, 0.0))]);
        assert!(p.apply(0).is_empty());
    }

    #[test]
    fn leaking_sector_is_rejected() {
        let mut op = SpinOp::new(2);
        op.add_real(1.0, &[(1, Site::X)]);
        assert!(op.matrix_on(&balanced_sector(2)).is_err());
    }
}
