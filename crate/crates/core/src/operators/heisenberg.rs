//! Heisenberg-chain forms of the ring circuit Hamiltonian: the counter ⊗
//! spin operator, its momentum blocks, the open chain and the twisted
//! boundary term.

use std::f64::consts::PI;

use crate::configspace::binomial;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::sparse::{BasisTag, CsrMatrix, SparseHermitian};

use super::spin::{balanced_sector, full_tag, sector_tag, Site, SpinOp};

/// Parity and depth requirements shared by every ring-circuit path.
pub fn check_ring(n: usize, depth: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Parity {
            what: "n",
            value: n,
        });
    }
    if depth < 2 || !depth.is_multiple_of(2) {
        return Err(Error::Parity {
            what: "D",
            value: depth,
        });
    }
    if 2 * depth <= n {
        return Err(Error::DepthTooShallow { depth, half: n / 2 });
    }
    Ok(())
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Parity {
            what: "n",
            value: n,
        });
    }
    Ok(())
}

fn check_momentum(depth: usize, k: usize) -> Result<()> {
    if depth == 0 || k >= depth {
        return Err(Error::OutOfRange(format!(
            "momentum k = {k} for D = {depth}"
        )));
    }
    Ok(())
}

/// Adds `1/2 - 1/2 (XX + YY + ZZ)` on qubits `(i, j)`.
fn heisenberg_bond(op: &mut SpinOp, i: usize, j: usize) {
    op.constant(0.5);
    for s in [Site::X, Site::Y, Site::Z] {
        op.add_real(-0.5, &[(i, s), (j, s)]);
    }
}

/// `(n-1)/2 - 1/2 sum_{i<n} (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1})`.
pub fn open_chain_op(n: usize) -> SpinOp {
    let mut op = SpinOp::new(n);
    for i in 1..n {
        heisenberg_bond(&mut op, i, i + 1);
    }
    op
}

/// The same chain closed into a ring.
pub fn periodic_chain_op(n: usize) -> SpinOp {
    let mut op = open_chain_op(n);
    heisenberg_bond(&mut op, n, 1);
    op
}

pub fn twist(depth: usize, k: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k as f64 / depth as f64)
}

/// `1/2 (1 - Z_1 Z_n) - sigma_1^- sigma_n^+ e^{2 pi i k/D} - sigma_1^+ sigma_n^- e^{-2 pi i k/D}`.
pub fn delta_op(n: usize, depth: usize, k: usize) -> SpinOp {
    let w = twist(depth, k);
    let mut op = SpinOp::new(n);
    op.constant(0.5)
        .add_real(-0.5, &[(1, Site::Z), (n, Site::Z)])
        .add(-w, &[(1, Site::Minus), (n, Site::Plus)])
        .add(-w.conj(), &[(1, Site::Plus), (n, Site::Minus)]);
    op
}

pub fn momentum_op(n: usize, depth: usize, k: usize) -> SpinOp {
    let mut op = open_chain_op(n);
    op.extend(&delta_op(n, depth, k));
    op
}

/// Open chain on the balanced sector.
pub fn open_chain(n: usize) -> Result<SparseHermitian> {
    check_even(n)?;
    open_chain_op(n).hermitian_on(&balanced_sector(n), sector_tag(n))
}

pub fn periodic_chain(n: usize) -> Result<SparseHermitian> {
    check_even(n)?;
    periodic_chain_op(n).hermitian_on(&balanced_sector(n), sector_tag(n))
}

/// Boundary term on the balanced sector.
pub fn delta(n: usize, depth: usize, k: usize) -> Result<SparseHermitian> {
    check_even(n)?;
    check_momentum(depth, k)?;
    delta_op(n, depth, k).hermitian_on(&balanced_sector(n), sector_tag(n))
}

/// Boundary term on its two-qubit support `(1, n)`, basis `|x_1 x_n>`.
pub fn delta_pair(depth: usize, k: usize) -> Result<SparseHermitian> {
    check_momentum(depth, k)?;
    SparseHermitian::new(
        delta_op(2, depth, k).full_matrix(),
        BasisTag::new("qubits(1,n)"),
    )
}

/// `H(k)` on the balanced sector.
pub fn momentum_block(n: usize, depth: usize, k: usize) -> Result<SparseHermitian> {
    check_even(n)?;
    check_momentum(depth, k)?;
    momentum_op(n, depth, k).hermitian_on(&balanced_sector(n), sector_tag(n))
}

pub fn heisenberg_tag(n: usize, depth: usize) -> BasisTag {
    BasisTag::new(format!("counter(D={depth})⊗balanced(n={n})"))
}

/// The counter ⊗ spin operator, basis `|tau> (x) |x>` with index
/// `tau * C(n, n/2) + rank(x)`.
pub fn heisenberg_form(n: usize, depth: usize) -> Result<SparseHermitian> {
    check_ring(n, depth)?;
    let states = balanced_sector(n);
    let c = states.len();
    let mut spins = SpinOp::new(n);
    for i in 1..n {
        spins
            .add_real(
                1.0,
                &[
                    (i, Site::Plus),
                    (i, Site::Minus),
                    (i + 1, Site::Minus),
                    (i + 1, Site::Plus),
                ],
            )
            .add_real(
                1.0,
                &[
                    (i, Site::Minus),
                    (i, Site::Plus),
                    (i + 1, Site::Plus),
                    (i + 1, Site::Minus),
                ],
            )
            .add_real(-1.0, &[(i, Site::Plus), (i + 1, Site::Minus)])
            .add_real(-1.0, &[(i, Site::Minus), (i + 1, Site::Plus)]);
    }
    spins
        .add_real(
            1.0,
            &[
                (n, Site::Plus),
                (n, Site::Minus),
                (1, Site::Minus),
                (1, Site::Plus),
            ],
        )
        .add_real(
            1.0,
            &[
                (n, Site::Minus),
                (n, Site::Plus),
                (1, Site::Plus),
                (1, Site::Minus),
            ],
        );
    let mut hop = SpinOp::new(n);
    hop.add_real(1.0, &[(1, Site::Minus), (n, Site::Plus)]);

    let local = spins.matrix_on(&states)?.triplets();
    let shift = hop.matrix_on(&states)?.triplets();
    let mut t = Vec::with_capacity(depth * (local.len() + 2 * shift.len()));
    for tau in 0..depth {
        let prev = (tau + depth - 1) % depth;
        t.extend(local.iter().map(|&(i, j, a)| (tau * c + i, tau * c + j, a)));
        for &(i, j, a) in &shift {
            t.push((prev * c + i, tau * c + j, -a));
            t.push((tau * c + j, prev * c + i, -a.conj()));
        }
    }
    SparseHermitian::from_triplets(depth * c, t, heisenberg_tag(n, depth))
}

/// `|tau, x> -> |tau + 1, x>` on the counter ⊗ spin basis.
pub fn tau_shift(n: usize, depth: usize) -> CsrMatrix {
    let c = binomial(n, n / 2);
    let t = (0..depth)
        .flat_map(|tau| {
            (0..c).map(move |i| (((tau + 1) % depth) * c + i, tau * c + i, C64::new(1.0, 0.0)))
        })
        .collect();
    CsrMatrix::from_triplets(depth * c, depth * c, t)
}

/// Total-spin operators on the full `2^n` space.
#[derive(Debug, Clone)]
pub struct SymmetryOps {
    pub sx: CsrMatrix,
    pub sy: CsrMatrix,
    pub sz: CsrMatrix,
    pub s2: CsrMatrix,
    pub s_minus: CsrMatrix,
}

pub fn symmetry_ops(n: usize) -> SymmetryOps {
    let total = |s: Site| {
        let mut op = SpinOp::new(n);
        for i in 1..=n {
            op.add_real(0.5, &[(i, s)]);
        }
        op.full_matrix()
    };
    let (sx, sy, sz) = (total(Site::X), total(Site::Y), total(Site::Z));
    let s2 = sx.mul(&sx).add(&sy.mul(&sy)).add(&sz.mul(&sz));
    let s_minus = sx.sub(&sy.scale(C64::new(0.0, 1.0)));
    SymmetryOps {
        sx,
        sy,
        sz,
        s2,
        s_minus,
    }
}

/// `H(k)` on the full `2^n` space, for symmetry checks across sectors.
pub fn momentum_block_full(n: usize, depth: usize, k: usize) -> Result<SparseHermitian> {
    check_momentum(depth, k)?;
    SparseHermitian::new(momentum_op(n, depth, k).full_matrix(), full_tag(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;

    #[test]
    fn two_site_open_chain() {
        let ev = hermitian_eigenvalues(&open_chain(2).unwrap().to_dense());
        assert!((ev[0]).abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_twist_closes_the_ring() {
        let h0 = momentum_block(6, 4, 0).unwrap();
        let ring = periodic_chain(6).unwrap();
        assert!(h0.max_diff(&ring).unwrap() < 1e-14);
    }

    #[test]
    fn boundary_term_gap() {
        for k in 1..4 {
            let ev = hermitian_eigenvalues(&delta_pair(4, k).unwrap().to_dense());
            assert!(ev[0].abs() < 1e-12);
            let first_nonzero = ev.iter().copied().find(|&v| v > 1e-9).unwrap();
            assert!(first_nonzero >= 2.0 - 1e-12);
        }
    }

    #[test]
    fn ring_checks() {
        assert!(matches!(
            check_ring(3, 4),
            Err(Error::Parity { what: "n", .. })
        ));
        assert!(matches!(
            check_ring(4, 3),
            Err(Error::Parity { what: "D", .. })
        ));
        assert!(matches!(
            check_ring(8, 4),
            Err(Error::DepthTooShallow { .. })
        ));
        assert!(momentum_block(4, 4, 4).is_err());
    }
}
