//! Kernel geometry: principal angles, the geometric lemma bound, reduced
//! density matrices and fidelities.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigen, max_abs, orthonormality_error, CMat, CVec, C64, ZERO};
use crate::operators::{balanced_sector, delta, open_chain};
use crate::sparse::SparseHermitian;

use super::{first_nonzero, full_spectrum, kernel_basis, norm_bound};

/// Cosine of the smallest principal angle: the largest singular value of
/// `P^dag Q` for orthonormal column bases `P`, `Q`.
pub fn subspace_angle(p: &CMat, q: &CMat) -> Result<f64> {
    if p.ncols() == 0 || q.ncols() == 0 || p.nrows() != q.nrows() {
        return Err(Error::RankDeficient);
    }
    if orthonormality_error(p) > 1e-10 || orthonormality_error(q) > 1e-10 {
        return Err(Error::RankDeficient);
    }
    let m = p.adjoint() * q;
    Ok(m.singular_values().iter().copied().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct KitaevReport {
    pub lambda1_a: f64,
    pub lambda1_b: f64,
    pub cos_theta: f64,
    pub bound: f64,
    /// Exact smallest eigenvalue of `A + B`, for comparison.
    pub lambda_min_sum: f64,
}

/// `min(lambda_1(A), lambda_1(B)) (1 - cos theta)` with every ingredient
/// computed by dense diagonalization.
pub fn kitaev_bound(a: &SparseHermitian, b: &SparseHermitian) -> Result<KitaevReport> {
    let sum = a.add(b)?;
    let ka = kernel_basis(a);
    let kb = kernel_basis(b);
    let cos_theta = if ka.ncols() == 0 || kb.ncols() == 0 {
        0.0
    } else {
        subspace_angle(&ka, &kb)?
    };
    if cos_theta >= 1.0 - 1e-8 {
        return Err(Error::KernelsOverlap { cos_theta });
    }
    let nonzero = |h: &SparseHermitian| {
        first_nonzero(&full_spectrum(h), norm_bound(h))
            .ok_or_else(|| Error::OutOfRange("operator without a nonzero eigenvalue".into()))
    };
    let (l1a, l1b) = (nonzero(a)?, nonzero(b)?);
    Ok(KitaevReport {
        lambda1_a: l1a,
        lambda1_b: l1b,
        cos_theta,
        bound: l1a.min(l1b) * (1.0 - cos_theta),
        lambda_min_sum: full_spectrum(&sum)[0],
    })
}

/// Reduced density matrix on `subset` (1-based qubits, first listed is the
/// most significant) of a normalized vector laid out as `aux * 2^n + z`.
pub fn reduced_density(state: &CVec, n: usize, subset: &[usize]) -> Result<CMat> {
    let dq = 1usize << n;
    if !state.len().is_multiple_of(dq) || subset.iter().any(|&q| q == 0 || q > n) {
        return Err(Error::OutOfRange("subset or state layout".into()));
    }
    let aux = state.len() / dq;
    let k = subset.len();
    let keep_mask: usize = subset.iter().map(|&q| 1usize << (n - q)).sum();
    let local = |z: usize| {
        subset
            .iter()
            .fold(0, |acc, &q| (acc << 1) | ((z >> (n - q)) & 1))
    };
    let mut rho = CMat::zeros(1 << k, 1 << k);
    for a in 0..aux {
        for z in 0..dq {
            let amp = state[a * dq + z];
            if amp == ZERO {
                continue;
            }
            let rest = z & !keep_mask;
            for w in 0..dq {
                if w & !keep_mask != rest {
                    continue;
                }
                rho[(local(z), local(w))] += amp * state[a * dq + w].conj();
            }
        }
    }
    Ok(rho)
}

fn psd_sqrt(m: &CMat) -> CMat {
    let e = hermitian_eigen(&((m + m.adjoint()) * c(0.5, 0.0)));
    let d = CMat::from_diagonal(&CVec::from_iterator(
        e.values.len(),
        e.values.iter().map(|&v| c(v.max(0.0).sqrt(), 0.0)),
    ));
    &e.vectors * d * e.vectors.adjoint()
}

/// `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &CMat, sigma: &CMat) -> f64 {
    let s = psd_sqrt(rho);
    let inner = &s * sigma * &s;
    let e = hermitian_eigen(&((&inner + inner.adjoint()) * c(0.5, 0.0)));
    let tr: f64 = e.values.iter().map(|&v| v.max(0.0).sqrt()).sum();
    tr * tr
}

/// The two-qubit reduced state of the uniform balanced superposition in its
/// closed form: weight `(n-2)/(4(n-1))` on `|00>` and `|11>`, and
/// `n/(2(n-1))` on `(|01> + |10>)/sqrt 2`.
pub fn rho_a0_printed(n: usize) -> CMat {
    let nf = n as f64;
    let w = (nf - 2.0) / (4.0 * (nf - 1.0));
    let e = nf / (2.0 * (nf - 1.0));
    let mut rho = CMat::zeros(4, 4);
    rho[(0, 0)] = c(w, 0.0);
    rho[(3, 3)] = c(w, 0.0);
    for i in [1, 2] {
        for j in [1, 2] {
            rho[(i, j)] = c(e / 2.0, 0.0);
        }
    }
    rho
}

fn eta(depth: usize, k: usize) -> CVec {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CVec::from_vec(vec![
        ZERO,
        c(s, 0.0),
        C64::from_polar(s, -2.0 * PI * k as f64 / depth as f64),
        ZERO,
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct AngleReport {
    pub n: usize,
    #[serde(rename = "D")]
    pub depth: usize,
    pub k: usize,
    pub cos_theta: f64,
    /// Cauchy-Schwarz fidelity bound on `cos theta`.
    pub closed_form: f64,
    /// `1 - pi^2 n / (4 D^2 (n-1))`, reported only.
    pub asymptotic: f64,
    pub eta_overlap_sq: f64,
    pub eta_overlap_sq_expected: f64,
    pub rho_a0_error: f64,
    pub pass: bool,
}

pub fn angle_lemma_report(n: usize, depth: usize, k: usize) -> Result<AngleReport> {
    if k == 0 || k >= depth {
        return Err(Error::OutOfRange(format!(
            "momentum k = {k} for D = {depth}"
        )));
    }
    let a = open_chain(n)?;
    let b = delta(n, depth, k)?;
    let cos_theta = subspace_angle(&kernel_basis(&a), &kernel_basis(&b))?;
    let nf = n as f64;
    let cosk = (2.0 * PI * k as f64 / depth as f64).cos();
    let closed_form =
        (2.0 * (nf - 2.0) / (4.0 * (nf - 1.0)) + nf * (1.0 + cosk) / (4.0 * (nf - 1.0))).sqrt();
    let asymptotic = 1.0 - PI * PI * nf / (4.0 * (depth * depth) as f64 * (nf - 1.0));
    let eta_overlap_sq = eta(depth, 0).dotc(&eta(depth, k)).norm_sqr();

    let sector = balanced_sector(n);
    let mut uniform = CVec::zeros(1 << n);
    let amp = c((sector.len() as f64).sqrt().recip(), 0.0);
    for &z in &sector {
        uniform[z] = amp;
    }
    let rho = reduced_density(&uniform, n, &[1, n])?;
    let rho_a0_error = max_abs(&(rho - rho_a0_printed(n)));
    Ok(AngleReport {
        n,
        depth,
        k,
        cos_theta,
        closed_form,
        asymptotic,
        eta_overlap_sq,
        eta_overlap_sq_expected: (1.0 + cosk) / 2.0,
        rho_a0_error,
        pass: cos_theta <= closed_form + 1e-12,
    })
}

/// Pure-state density matrix `|psi><psi|`.
pub fn projector(psi: &CVec) -> CMat {
    psi * psi.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::sparse::BasisTag;

    #[test]
    fn orthogonal_and_identical_subspaces() {
        let e = CMat::identity(4, 4);
        let p = e.columns(0, 2).into_owned();
        let q = e.columns(2, 2).into_owned();
        assert!(subspace_angle(&p, &q).unwrap().abs() < 1e-15);
        assert!((subspace_angle(&p, &p).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            subspace_angle(&(p.clone() * c(2.0, 0.0)), &q),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn complementary_diagonals() {
        let a = SparseHermitian::from_diagonal(&[0.0, 1.0], BasisTag::new("d"));
        let b = SparseHermitian::from_diagonal(&[1.0, 0.0], BasisTag::new("d"));
        let r = kitaev_bound(&a, &b).unwrap();
        assert!(r.cos_theta.abs() < 1e-15);
        assert!((r.bound - 1.0).abs() < 1e-15 && (r.lambda_min_sum - 1.0).abs() < 1e-15);
        assert!(matches!(
            kitaev_bound(&a, &a),
            Err(Error::KernelsOverlap { .. })
        ));
    }

    #[test]
    fn bell_pair_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CVec::from_vec(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)]);
        let rho = reduced_density(&bell, 2, &[1]).unwrap();
        assert!(max_abs(&(rho - CMat::identity(2, 2) * c(0.5, 0.0))) < 1e-15);
        let prod = CVec::from_vec(vec![ZERO, ONE, ZERO, ZERO]);
        let r = reduced_density(&prod, 2, &[2]).unwrap();
        assert!((fidelity(&r, &r) - 1.0).abs() < 1e-12);
        assert!((r[(1, 1)].re - 1.0).abs() < 1e-15);
    }
}
