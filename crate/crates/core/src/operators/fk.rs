//! Single-clock propagation Hamiltonians on a line and on a circle.
//!
//! Basis order is state ⊗ clock: index `s * clocks + t`.

use crate::circuit::UNITARY_TOL;
use crate::error::{Error, Result};
use crate::linalg::{check_unitary, CMat, CVec, C64};
use crate::sparse::{BasisTag, SparseHermitian};

fn state_dim(gates: &[CMat]) -> Result<usize> {
    let first = gates
        .first()
        .ok_or_else(|| Error::OutOfRange("empty gate list".into()))?;
    let d = first.nrows();
    for g in gates {
        if g.nrows() != d || g.ncols() != d {
            return Err(Error::OutOfRange("gates of unequal dimension".into()));
        }
        check_unitary(g, UNITARY_TOL)?;
    }
    Ok(d)
}

/// Propagation terms `-U (x) |to><from| + h.c. + |to><to| + |from><from|`.
fn propagation(
    steps: &[(usize, usize, CMat)],
    d: usize,
    clocks: usize,
    tag: BasisTag,
) -> Result<SparseHermitian> {
    let mut t = Vec::new();
    for (from, to, u) in steps {
        for s in 0..d {
            t.push((s * clocks + to, s * clocks + to, C64::new(1.0, 0.0)));
            t.push((s * clocks + from, s * clocks + from, C64::new(1.0, 0.0)));
            for r in 0..d {
                let v = u[(r, s)];
                if v != C64::new(0.0, 0.0) {
                    t.push((r * clocks + to, s * clocks + from, -v));
                    t.push((s * clocks + from, r * clocks + to, -v.conj()));
                }
            }
        }
    }
    SparseHermitian::from_triplets(d * clocks, t, tag)
}

/// Line clock `0..=L`; gate `U_t` advances the clock from `t-1` to `t`.
pub fn fk_line(gates: &[CMat]) -> Result<SparseHermitian> {
    let d = state_dim(gates)?;
    let l = gates.len();
    let steps: Vec<_> = gates
        .iter()
        .enumerate()
        .map(|(i, u)| (i, i + 1, u.clone()))
        .collect();
    propagation(
        &steps,
        d,
        l + 1,
        BasisTag::new(format!("line(L={l},d={d})")),
    )
}

/// The gate sequence unravelled onto a circle: `U_1..U_L` followed by
/// `U_L^dag..U_1^dag`, clock in `Z_{2L}`.
pub fn unravel_gates(gates: &[CMat]) -> Vec<CMat> {
    gates
        .iter()
        .cloned()
        .chain(gates.iter().rev().map(|u| u.adjoint()))
        .collect()
}

pub fn fk_circle(gates: &[CMat]) -> Result<SparseHermitian> {
    let d = state_dim(gates)?;
    let l = gates.len();
    let m = 2 * l;
    let steps: Vec<_> = unravel_gates(gates)
        .into_iter()
        .enumerate()
        .map(|(i, u)| (i, (i + 1) % m, u))
        .collect();
    propagation(&steps, d, m, BasisTag::new(format!("circle(L={l},d={d})")))
}

fn history(sequence: &[CMat], xi: &CVec, clocks: usize) -> CVec {
    let d = xi.len();
    let mut out = CVec::zeros(d * clocks);
    let mut cur = xi.clone();
    let norm = C64::new((clocks as f64).sqrt().recip(), 0.0);
    for t in 0..clocks {
        if t > 0 {
            cur = &sequence[t - 1] * cur;
        }
        for s in 0..d {
            out[s * clocks + t] = cur[s] * norm;
        }
    }
    out
}

pub fn line_history_state(gates: &[CMat], xi: &CVec) -> CVec {
    history(gates, xi, gates.len() + 1)
}

pub fn circle_history_state(gates: &[CMat], xi: &CVec) -> CVec {
    history(&unravel_gates(gates), xi, 2 * gates.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, identity};

    #[test]
    fn two_step_line_block() {
        let h = fk_line(&[identity(1), identity(1)]).unwrap();
        let ev = hermitian_eigenvalues(&h.to_dense());
        for (a, b) in ev.iter().zip([0.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_is_cycle_laplacian() {
        let h = fk_circle(&[identity(1), identity(1)]).unwrap();
        let ev = hermitian_eigenvalues(&h.to_dense());
        for (a, b) in ev.iter().zip([0.0, 2.0, 2.0, 4.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
